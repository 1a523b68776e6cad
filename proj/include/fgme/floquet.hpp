#pragma once

#include "fgme/model.hpp"

#include <memory>
#include <numeric>
#include <sstream>

namespace fgme {

struct SambeConfig {
    int cutoff = 8;
    // memory budget for the extended space; 4(2c+1) rows
    int max_dimension = 4 * (2 * 64 + 1);

    int dimension() const { return 4 * (2 * cutoff + 1); }

    void validate() const {
        if (cutoff < 1) throw std::invalid_argument("sambe.cutoff: must be >= 1");
        if (dimension() > max_dimension)
            throw TruncationError("sambe: truncation too large (dimension " + std::to_string(dimension()) +
                                  " exceeds budget " + std::to_string(max_dimension) + ")");
    }
};

// Q_ext = sum_k T_k (x) H_k + w_L F_z (x) 1, block (l, m) = H_{l-m} + delta_lm l w_L
inline Eigen::MatrixXcd build_extended_operator(const HamiltonianFourier& hf, double omega_l, const SambeConfig& cfg) {
    cfg.validate();
    if (!(omega_l > 0.0)) throw std::invalid_argument("build_extended_operator: omega_l must be > 0");
    const int c = cfg.cutoff, n = cfg.dimension();
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
    for (int l = -c; l <= c; ++l)
        for (int m = -c; m <= c; ++m) {
            if (!hf.contains(l - m)) continue;
            q.block<4, 4>(4 * (l + c), 4 * (m + c)) = hf[l - m];
        }
    for (int l = -c; l <= c; ++l) q.block<4, 4>(4 * (l + c), 4 * (l + c)) += Mat4::Identity() * (l * omega_l);
    return q;
}

// (lower, upper]
struct BrillouinZone {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double e) const { return e > lower && e <= upper; }
};

struct FloquetDecomposition {
    double drive_frequency = 0.0;
    int cutoff = 0;
    BrillouinZone zone;
    std::array<double, 4> quasienergies{};
    // eigenvalue of the chosen representative before folding, and the fold shift s
    // with quasienergy = unfolded - s w_L
    std::array<double, 4> unfolded{};
    std::array<int, 4> fold_shift{};
    std::array<FourierSeries<Vec4>, 4> modes;

    double period() const { return 2.0 * std::numbers::pi / drive_frequency; }
    Vec4 mode_at(int r, double t) const { return modes[std::size_t(r)].at(t, drive_frequency); }

    // columns |r(t)>
    Mat4 mode_matrix(double t) const {
        Mat4 m;
        for (int r = 0; r < 4; ++r) m.col(r) = mode_at(r, t);
        return m;
    }

    // <<r|r'>> = (1/T) int <r(t)|r'(t)> dt
    cplx extended_inner(int r, int rp) const {
        const auto& a = modes[std::size_t(r)];
        const auto& b = modes[std::size_t(rp)];
        cplx s = 0.0;
        for (int k = std::max(a.min_index(), b.min_index()); k <= std::min(a.max_index(), b.max_index()); ++k)
            s += a[k].dot(b[k]);
        return s;
    }
};

namespace detail {

struct ModeCandidate {
    int index;
    double w0; // weight in harmonic 0
    double w1; // weight in |m| <= 1
};

// <shift_m a | b> where shift_m moves component l to l + m
inline cplx shifted_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, int m, int cutoff) {
    cplx s = 0.0;
    for (int l = -cutoff; l <= cutoff; ++l) {
        const int src = l - m;
        if (src < -cutoff || src > cutoff) continue;
        s += a.segment<4>(4 * (src + cutoff)).dot(b.segment<4>(4 * (l + cutoff)));
    }
    return s;
}

} // namespace detail

// Diagonalize Q_ext, pick one representative per physical state and fold it into
// (-w_L/2, w_L/2]. Exactly degenerate clusters are first rotated to diagonalize
// F_z (x) 1 + 1 (x) P with P weighting the eigenvectors of H_0 (the central block)
// by incommensurate constants, so symmetric collisions resolve into sector-pure vectors.
inline FloquetDecomposition solve_floquet(const Eigen::MatrixXcd& ext, double omega_l, const SambeConfig& cfg) {
    cfg.validate();
    const int c = cfg.cutoff, n = cfg.dimension();
    if (ext.rows() != n || ext.cols() != n)
        throw std::invalid_argument("solve_floquet: extended matrix does not match cutoff " + std::to_string(c));
    const double herm = (ext - ext.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12 * std::max(1.0, ext.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("solve_floquet: extended matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ext);
    if (es.info() != Eigen::Success) throw SolverError("solve_floquet: eigensolver failed");
    const Eigen::VectorXd evals = es.eigenvalues();
    Eigen::MatrixXcd evecs = es.eigenvectors();

    // tie-breaker for degenerate clusters
    const Mat4 h0 = ext.block<4, 4>(4 * c, 4 * c);
    Eigen::SelfAdjointEigenSolver<Mat4> h0es(h0);
    Mat4 p = Mat4::Zero();
    for (int r = 0; r < 4; ++r) p += (0.1236 * r) * h0es.eigenvectors().col(r) * h0es.eigenvectors().col(r).adjoint();
    const double degenerate_tol = 1e-9 * std::max(1.0, omega_l);
    for (int start = 0; start < n;) {
        int stop = start + 1;
        while (stop < n && evals(stop) - evals(stop - 1) < degenerate_tol) ++stop;
        if (stop - start > 1) {
            const int w = stop - start;
            Eigen::MatrixXcd vc = evecs.middleCols(start, w);
            Eigen::MatrixXcd gv(n, w);
            for (int l = -c; l <= c; ++l)
                gv.middleRows(4 * (l + c), 4) = double(l) * vc.middleRows(4 * (l + c), 4) + p * vc.middleRows(4 * (l + c), 4);
            Eigen::MatrixXcd g = vc.adjoint() * gv;
            g = 0.5 * (g + g.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(g);
            evecs.middleCols(start, w) = vc * ges.eigenvectors();
        }
        start = stop;
    }

    std::vector<detail::ModeCandidate> cand(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double w1 = 0.0;
        for (int l = -1; l <= 1; ++l) w1 += evecs.col(j).segment<4>(4 * (l + c)).squaredNorm();
        cand[std::size_t(j)] = {j, evecs.col(j).segment<4>(4 * c).squaredNorm(), w1};
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.w0 - b.w0) > 1e-12) return a.w0 > b.w0;
        if (std::abs(a.w1 - b.w1) > 1e-12) return a.w1 > b.w1;
        return a.index < b.index;
    });

    std::vector<int> picks;
    for (const auto& cd : cand) {
        if (picks.size() == 4) break;
        bool duplicate = false;
        for (int pj : picks) {
            const double q = (evals(cd.index) - evals(pj)) / omega_l;
            const double m = std::round(q);
            if (std::abs(q - m) > 1e-8) continue;
            if (std::abs(detail::shifted_overlap(evecs.col(pj), evecs.col(cd.index), int(m), c)) > 0.5) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) picks.push_back(cd.index);
    }
    if (picks.size() != 4) {
        std::ostringstream os;
        os << "solve_floquet: degenerate/ambiguous zone folding, found " << picks.size()
           << " representatives; leading candidates (eigenvalue, w0):";
        for (std::size_t i = 0; i < std::min<std::size_t>(8, cand.size()); ++i)
            os << " (" << evals(cand[i].index) << ", " << cand[i].w0 << ")";
        throw SolverError(os.str());
    }
    std::sort(picks.begin(), picks.end(), [&](int a, int b) {
        return evals(a) < evals(b) || (evals(a) == evals(b) && a < b);
    });

    FloquetDecomposition dec;
    dec.drive_frequency = omega_l;
    dec.cutoff = c;
    dec.zone = {-0.5 * omega_l, 0.5 * omega_l};
    for (std::size_t r = 0; r < 4; ++r) {
        const int j = picks[r];
        const double e = evals(j);
        const int s = int(std::ceil((e - 0.5 * omega_l) / omega_l - 1e-10));
        double eps = e - s * omega_l;
        if (eps > dec.zone.upper) eps = dec.zone.upper; // overshoot below the fold tolerance
        FourierSeries<Vec4> mode(-c, c, Vec4::Zero());
        for (int l = -c; l <= c; ++l) mode.coeff(l) = evecs.col(j).segment<4>(4 * (l + c));
        dec.quasienergies[r] = eps;
        dec.unfolded[r] = e;
        dec.fold_shift[r] = s;
        dec.modes[r] = mode.shifted(s);
    }
    return dec;
}

inline FloquetDecomposition solve_floquet(const HamiltonianFourier& hf, double omega_l, const SambeConfig& cfg) {
    return solve_floquet(build_extended_operator(hf, omega_l, cfg), omega_l, cfg);
}

// P(t2, t1) = sum_r |r(t2)><r(t1)|
inline Mat4 micromotion(const FloquetDecomposition& dec, double t2, double t1) {
    return dec.mode_matrix(t2) * dec.mode_matrix(t1).adjoint();
}

// H^F_{t0} = sum_r eps_r |r(t0)><r(t0)|
inline Mat4 floquet_hamiltonian(const FloquetDecomposition& dec, double t0) {
    const Mat4 u = dec.mode_matrix(t0);
    Vec4 e;
    for (int r = 0; r < 4; ++r) e(r) = dec.quasienergies[std::size_t(r)];
    return u * e.asDiagonal() * u.adjoint();
}

// U(t, t0) = sum_r e^{-i eps_r (t - t0)} |r(t)><r(t0)|
inline Mat4 floquet_propagator(const FloquetDecomposition& dec, double t, double t0) {
    Vec4 ph;
    for (int r = 0; r < 4; ++r) ph(r) = std::polar(1.0, -dec.quasienergies[std::size_t(r)] * (t - t0));
    return dec.mode_matrix(t) * ph.asDiagonal() * dec.mode_matrix(t0).adjoint();
}

// Fourier components of the dyad |r(t)><r'(t)|: D_j = sum_a r_a r'_{a-j}^dagger
inline FourierSeries<Mat4> mode_dyad(const FloquetDecomposition& dec, int r, int rp) {
    const auto& a = dec.modes[std::size_t(r)];
    const auto& b = dec.modes[std::size_t(rp)];
    FourierSeries<Mat4> d(a.min_index() - b.max_index(), a.max_index() - b.min_index(), Mat4::Zero());
    for (int ia = a.min_index(); ia <= a.max_index(); ++ia)
        for (int ib = b.min_index(); ib <= b.max_index(); ++ib) d.coeff(ia - ib) += a[ia] * b[ib].adjoint();
    return d;
}

struct JumpEntry {
    int bath = 0;
    int r = 0;
    int rp = 0;
    int harmonic = 0;              // n
    double omega = 0.0;            // eps_r - eps_r'
    double shifted_frequency = 0.0; // omega + n w_L
    cplx amplitude = 0.0;          // <<r| T_{-n} (x) S |r'>>
};

struct JumpComponentTable {
    std::shared_ptr<const FloquetDecomposition> decomposition;
    std::array<Mat4, 2> coupling{};
    double floor = 1e-12;
    std::vector<JumpEntry> entries;

    // S_{i,w,n} = c |r(0)><r'(0)| (interaction-picture amplitude)
    Mat4 amplitude_matrix(const JumpEntry& e) const {
        return e.amplitude * decomposition->mode_at(e.r, 0.0) * decomposition->mode_at(e.rp, 0.0).adjoint();
    }

    // sum_{w,n} e^{i Delta t} S_{i,w,n}, which approximates U^dagger(t) S_i U(t)
    Mat4 reconstruct(int bath, double t) const {
        Mat4 out = Mat4::Zero();
        for (const auto& e : entries)
            if (e.bath == bath) out += std::polar(1.0, e.shifted_frequency * t) * amplitude_matrix(e);
        return out;
    }
};

// n_window < 0 keeps every harmonic the truncated modes can produce. Folding shifts
// the mode windows, so the useful n range for a pair (r, r') is offset by s_r - s_r'.
inline JumpComponentTable jump_components(const FloquetDecomposition& dec, const std::array<Mat4, 2>& coupling_ops,
                                          int n_window = -1, double floor = 1e-12) {
    JumpComponentTable table;
    table.decomposition = std::make_shared<const FloquetDecomposition>(dec);
    table.coupling = coupling_ops;
    table.floor = floor;
    const double w = dec.drive_frequency;
    for (int i = 0; i < 2; ++i)
        for (int r = 0; r < 4; ++r)
            for (int rp = 0; rp < 4; ++rp) {
                const auto& a = dec.modes[std::size_t(r)];
                const auto& b = dec.modes[std::size_t(rp)];
                const double omega = dec.quasienergies[std::size_t(r)] - dec.quasienergies[std::size_t(rp)];
                int nlo = b.min_index() - a.max_index(), nhi = b.max_index() - a.min_index();
                if (n_window >= 0) nlo = std::max(nlo, -n_window), nhi = std::min(nhi, n_window);
                for (int nn = nlo; nn <= nhi; ++nn) {
                    cplx s = 0.0;
                    for (int l = std::max(a.min_index(), b.min_index() - nn); l <= std::min(a.max_index(), b.max_index() - nn); ++l)
                        s += a[l].dot(coupling_ops[std::size_t(i)] * b[l + nn]);
                    if (std::abs(s) <= floor) continue;
                    table.entries.push_back({i, r, rp, nn, omega, omega + nn * w, s});
                }
            }
    return table;
}

} // namespace fgme
