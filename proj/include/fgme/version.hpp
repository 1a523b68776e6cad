#pragma once

namespace fgme {
inline constexpr const char* version = "0.1.0";
}
