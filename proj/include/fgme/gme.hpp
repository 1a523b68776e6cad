#pragma once

#include "fgme/floquet.hpp"

namespace fgme {

struct CountingFields {
    double chi_a = 0.0;
    double chi_b = 0.0;
    double operator[](int i) const { return i == 0 ? chi_a : chi_b; }
};

struct LiouvillianFourier {
    double drive_frequency = 0.0;
    CountingFields counting_fields;
    FourierSeries<Mat16> components;

    Mat16 at(double t) const { return components.at(t, drive_frequency); }
    int window() const { return components.max_index(); }
};

// D_i,k per bath; Qdot_i(t) = Tr(D_i(t) rho(t))
struct HeatCurrentGenerator {
    double drive_frequency = 0.0;
    std::array<FourierSeries<Mat16>, 2> per_bath;

    Mat16 at(int bath, double t) const { return per_bath[std::size_t(bath)].at(t, drive_frequency); }
};

namespace detail {

// Harmonic series sum_{entries of bath i} e^{i n w t} f(Delta) c |r(t)><r'(t)|, truncated to |k| <= window.
template <class Weight>
FourierSeries<Mat4> weighted_jump_series(const JumpComponentTable& table, const std::array<std::array<FourierSeries<Mat4>, 4>, 4>& dyads,
                                         int bath, int window, Weight&& weight) {
    FourierSeries<Mat4> out(-window, window, Mat4::Zero());
    for (const auto& e : table.entries) {
        if (e.bath != bath) continue;
        const cplx f = weight(e) * e.amplitude;
        if (f == 0.0) continue;
        const auto& d = dyads[std::size_t(e.r)][std::size_t(e.rp)];
        for (int j = d.min_index(); j <= d.max_index(); ++j) {
            const int k = j + e.harmonic;
            if (k < -window || k > window) continue;
            out.coeff(k) += f * d[j];
        }
    }
    return out;
}

inline std::array<std::array<FourierSeries<Mat4>, 4>, 4> all_dyads(const FloquetDecomposition& dec) {
    std::array<std::array<FourierSeries<Mat4>, 4>, 4> d;
    for (int r = 0; r < 4; ++r)
        for (int rp = 0; rp < 4; ++rp) d[std::size_t(r)][std::size_t(rp)] = mode_dyad(dec, r, rp);
    return d;
}

inline int default_window(const JumpComponentTable& table) { return 2 * table.decomposition->cutoff; }

inline void check_window(const JumpComponentTable& table, const HamiltonianFourier& hf, int window) {
    if (!table.decomposition) throw std::invalid_argument("gme: jump table has no decomposition");
    const int hmax = std::max(-hf.min_index(), hf.max_index());
    if (window < hmax)
        throw std::invalid_argument("gme: harmonic window " + std::to_string(window) +
                                    " cannot hold the Hamiltonian harmonics (needs >= " + std::to_string(hmax) + ")");
    const int cmax = 4 * table.decomposition->cutoff;
    if (window > cmax)
        throw std::invalid_argument("gme: harmonic window " + std::to_string(window) +
                                    " exceeds what cutoff " + std::to_string(table.decomposition->cutoff) + " resolves (" +
                                    std::to_string(cmax) + ")");
}

} // namespace detail

// L(t) rho = -i[H(t), rho] + sum_i ( -S A_i rho + S rho B_i^chi + A_i^chi rho S - rho B_i S )
// with A_i(t) = sum e^{i n w t} J N(Delta) S_{i,w,n}(t) and B_i(t) = sum e^{i n w t} J (1+N)(Delta) S_{i,w,n}(t);
// the sandwich terms carry e^{+i Delta chi_i} (A) and e^{-i Delta chi_i} (B).
inline LiouvillianFourier build_liouvillian(const JumpComponentTable& table, const std::array<BathSpec, 2>& baths,
                                            const HamiltonianFourier& hf, CountingFields chi = {}, int window = -1) {
    if (window < 0 && table.decomposition) window = detail::default_window(table);
    detail::check_window(table, hf, window);
    const auto dyads = detail::all_dyads(*table.decomposition);

    LiouvillianFourier lv;
    lv.drive_frequency = table.decomposition->drive_frequency;
    lv.counting_fields = chi;
    lv.components = FourierSeries<Mat16>(-window, window, Mat16::Zero());

    for (int k = hf.min_index(); k <= hf.max_index(); ++k)
        lv.components.coeff(k) += -I * (left_mul(hf[k]) - right_mul(hf[k]));

    for (int i = 0; i < 2; ++i) {
        const BathSpec& b = baths[std::size_t(i)];
        if (b.coupling == 0.0) continue;
        const Mat4& s = table.coupling[std::size_t(i)];
        const double x = chi[i];
        const auto a = detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return cplx(bath_rate(b, e.shifted_frequency).absorption);
        });
        const auto bb = detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return cplx(bath_rate(b, e.shifted_frequency).emission);
        });
        const auto ax = x == 0.0 ? a : detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return bath_rate(b, e.shifted_frequency).absorption * std::polar(1.0, e.shifted_frequency * x);
        });
        const auto bx = x == 0.0 ? bb : detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return bath_rate(b, e.shifted_frequency).emission * std::polar(1.0, -e.shifted_frequency * x);
        });
        for (int k = -window; k <= window; ++k) {
            lv.components.coeff(k) += -left_mul(s * a[k]) + sandwich(s, bx[k]) + sandwich(ax[k], s) - right_mul(bb[k] * s);
        }
    }
    return lv;
}

// D_i = d/d(i chi_i) L at chi = 0: rho -> S rho B'_i + A'_i rho S with
// A' weighted by +Delta J N and B' by -Delta J (1+N).
inline HeatCurrentGenerator heat_current_generator(const JumpComponentTable& table, const std::array<BathSpec, 2>& baths,
                                                   int window = -1) {
    if (!table.decomposition) throw std::invalid_argument("heat_current_generator: jump table has no decomposition");
    if (window < 0) window = detail::default_window(table);
    const auto dyads = detail::all_dyads(*table.decomposition);

    HeatCurrentGenerator gen;
    gen.drive_frequency = table.decomposition->drive_frequency;
    for (int i = 0; i < 2; ++i) {
        gen.per_bath[std::size_t(i)] = FourierSeries<Mat16>(-window, window, Mat16::Zero());
        const BathSpec& b = baths[std::size_t(i)];
        if (b.coupling == 0.0) continue;
        const Mat4& s = table.coupling[std::size_t(i)];
        const auto ap = detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return cplx(e.shifted_frequency * bath_rate(b, e.shifted_frequency).absorption);
        });
        const auto bp = detail::weighted_jump_series(table, dyads, i, window, [&](const JumpEntry& e) {
            return cplx(-e.shifted_frequency * bath_rate(b, e.shifted_frequency).emission);
        });
        for (int k = -window; k <= window; ++k)
            gen.per_bath[std::size_t(i)].coeff(k) = sandwich(s, bp[k]) + sandwich(ap[k], s);
    }
    return gen;
}

} // namespace fgme
