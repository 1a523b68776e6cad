#pragma once

#include "fgme/types.hpp"
#include "fgme/model.hpp"
#include "fgme/floquet.hpp"
#include "fgme/gme.hpp"
#include "fgme/steady.hpp"
#include "fgme/concurrence.hpp"
#include "fgme/observables.hpp"
#include "fgme/effective.hpp"
#include "fgme/config.hpp"
#include "fgme/sweep.hpp"
#include "fgme/version.hpp"
