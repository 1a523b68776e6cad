#pragma once

#include "fgme/concurrence.hpp"
#include "fgme/gme.hpp"

#include <optional>

namespace fgme {

struct QuasiSteadyState {
    double drive_frequency = 0.0;
    int cutoff = 0;
    FourierSeries<Mat4> rho; // rho_k, k in [-cutoff, cutoff]
    double residual = 0.0;   // ||M x|| / ||x||
    double smallest_singular_value = 0.0;
    double second_singular_value = 0.0;
    double min_eigenvalue = 0.0; // over 64 sampled phases

    double period() const { return 2.0 * std::numbers::pi / drive_frequency; }
};

inline Mat4 density_at_time(const QuasiSteadyState& q, double t) {
    // reduce the phase first so that rho(t + T) and rho(t) see identical arguments
    const double theta = std::remainder(q.drive_frequency * t, 2.0 * std::numbers::pi);
    const Mat4 m = q.rho.at_phase(theta);
    return 0.5 * (m + m.adjoint());
}

inline double min_eigenvalue_over_period(const QuasiSteadyState& q, int samples = 64) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j) {
        Eigen::SelfAdjointEigenSolver<Mat4> es(density_at_time(q, q.period() * j / samples), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
}

// [sum_k T_k (x) L_k - i w_L F_z] on harmonics [-c, c]
inline Eigen::MatrixXcd build_extended_generator(const LiouvillianFourier& lv, double omega_l, int cutoff) {
    const int nb = 2 * cutoff + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(16 * nb, 16 * nb);
    for (int l = -cutoff; l <= cutoff; ++l) {
        for (int k = -cutoff; k <= cutoff; ++k)
            if (lv.components.contains(l - k)) m.block<16, 16>(16 * (l + cutoff), 16 * (k + cutoff)) = lv.components[l - k];
        m.block<16, 16>(16 * (l + cutoff), 16 * (l + cutoff)) -= I * (l * omega_l) * Mat16::Identity();
    }
    return m;
}

// Right singular vector of the smallest singular value. The arbitrary global phase is
// removed through Tr rho_0 before rho_{-k} = rho_k^dagger is enforced by averaging;
// the result is then scaled to Tr rho_0 = 1.
inline QuasiSteadyState solve_quasi_steady_state(const LiouvillianFourier& lv, double omega_l, const SambeConfig& cfg) {
    cfg.validate();
    if (lv.counting_fields.chi_a != 0.0 || lv.counting_fields.chi_b != 0.0)
        throw std::invalid_argument("solve_quasi_steady_state: generator must be built at chi = 0");
    const int c = cfg.cutoff;
    const Eigen::MatrixXcd m = build_extended_generator(lv, omega_l, c);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index n = sv.size();
    const double smax = sv(0), s1 = sv(n - 1), s2 = sv(n - 2);
    if (s2 <= 1e-10 * std::max(1.0, smax)) {
        std::ostringstream os;
        os << "solve_quasi_steady_state: non-unique quasi-steady state, smallest singular values " << s1 << ", " << s2;
        throw SolverError(os.str());
    }
    Eigen::VectorXcd x = svd.matrixV().col(n - 1);

    QuasiSteadyState q;
    q.drive_frequency = omega_l;
    q.cutoff = c;
    q.smallest_singular_value = s1;
    q.second_singular_value = s2;
    q.rho = FourierSeries<Mat4>(-c, c, Mat4::Zero());
    for (int k = -c; k <= c; ++k) q.rho.coeff(k) = unvec(x.segment<16>(16 * (k + c)));

    const cplx tr0 = q.rho[0].trace();
    if (std::abs(tr0) < 1e-300) throw SolverError("solve_quasi_steady_state: kernel vector has zero trace");
    const cplx phase = std::conj(tr0) / std::abs(tr0);
    for (int k = -c; k <= c; ++k) q.rho.coeff(k) *= phase;
    auto sym = q.rho;
    for (int k = -c; k <= c; ++k) sym.coeff(k) = 0.5 * (q.rho[k] + q.rho[-k].adjoint());
    const double scale = 1.0 / sym[0].trace().real();
    for (int k = -c; k <= c; ++k) q.rho.coeff(k) = scale * sym[k];

    for (int k = -c; k <= c; ++k) x.segment<16>(16 * (k + c)) = vec(q.rho[k]);
    q.residual = (m * x).norm() / x.norm();

    q.min_eigenvalue = min_eigenvalue_over_period(q);
    if (q.min_eigenvalue < -1e-5) {
        std::ostringstream os;
        os << "solve_quasi_steady_state: rho(t) has eigenvalue " << q.min_eigenvalue << " below -1e-5";
        throw SolverError(os.str());
    }
    return q;
}

// ---- RK4 time propagation (oracle for the Fourier solver) ----

struct Trajectory {
    std::vector<double> times;
    std::vector<Mat4> states;
};

namespace detail {

inline Mat16 rk4_step_matrix(const Mat16& l1, const Mat16& l2, const Mat16& l3, double h) {
    const Mat16 id = Mat16::Identity();
    const Mat16 k1 = l1;
    const Mat16 k2 = l2 * (id + 0.5 * h * k1);
    const Mat16 k3 = l2 * (id + 0.5 * h * k2);
    const Mat16 k4 = l3 * (id + h * k3);
    return id + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_density(const Mat4& rho, const char* who) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument(std::string(who) + ": rho0 is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw std::invalid_argument(std::string(who) + ": rho0 does not have unit trace");
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) throw std::invalid_argument(std::string(who) + ": rho0 is not positive semidefinite");
}

} // namespace detail

// RK4 step matrices over one period with steps_per_period equal steps starting at t = 0.
class PeriodicPropagator {
public:
    PeriodicPropagator(const LiouvillianFourier& lv, int steps_per_period) : omega_(lv.drive_frequency) {
        if (steps_per_period < 1) throw std::invalid_argument("PeriodicPropagator: steps_per_period must be >= 1");
        const double period = 2.0 * std::numbers::pi / omega_;
        h_ = period / steps_per_period;
        steps_.reserve(std::size_t(steps_per_period));
        Mat16 left = lv.at(0.0);
        for (int j = 0; j < steps_per_period; ++j) {
            const Mat16 mid = lv.at((j + 0.5) * h_);
            const Mat16 right = lv.at((j + 1) * h_);
            steps_.push_back(detail::rk4_step_matrix(left, mid, right, h_));
            left = right;
        }
        map_ = Mat16::Identity();
        for (const auto& s : steps_) map_ = (s * map_).eval();
    }

    double step() const { return h_; }
    int steps_per_period() const { return int(steps_.size()); }
    const Mat16& step_matrix(int j) const { return steps_[std::size_t(j)]; }
    // one-period map from phase 0
    const Mat16& period_map() const { return map_; }

    Mat4 advance_periods(const Mat4& rho, long periods) const {
        Vec16 v = vec(rho);
        for (long p = 0; p < periods; ++p) v = map_ * v;
        return unvec(v);
    }

private:
    double omega_;
    double h_;
    std::vector<Mat16> steps_;
    Mat16 map_;
};

// Fixed-step RK4 for d rho/dt = L(t) rho from t = 0. When the period is an integer
// number of steps, step matrices are built once per phase and reused.
inline Trajectory propagate(const LiouvillianFourier& lv, const Mat4& rho0, double horizon, double dt, int sample_every = 1) {
    detail::check_density(rho0, "propagate");
    if (!(dt > 0.0) || !(horizon >= 0.0)) throw std::invalid_argument("propagate: need dt > 0 and horizon >= 0");
    if (sample_every < 1) throw std::invalid_argument("propagate: sample_every must be >= 1");
    const long nsteps = long(std::ceil(horizon / dt - 1e-9));
    const double h = nsteps > 0 ? horizon / nsteps : dt;
    const double period = 2.0 * std::numbers::pi / lv.drive_frequency;
    const double per = period / h;
    const bool periodic = std::abs(per - std::round(per)) < 1e-9 * per && std::round(per) <= 1e6;

    std::optional<PeriodicPropagator> cache;
    if (periodic && nsteps > 0) cache.emplace(lv, int(std::round(per)));

    Trajectory tr;
    Vec16 v = vec(rho0);
    tr.times.push_back(0.0);
    tr.states.push_back(rho0);
    for (long j = 0; j < nsteps; ++j) {
        const double t = j * h;
        if (cache) {
            v = cache->step_matrix(int(j % cache->steps_per_period())) * v;
        } else {
            v = detail::rk4_step_matrix(lv.at(t), lv.at(t + 0.5 * h), lv.at(t + h), h) * v;
        }
        const Mat4 rho = unvec(v);
        const double drift = std::abs(rho.trace() - 1.0);
        const double purity = (rho * rho).trace().real();
        if (!std::isfinite(drift) || drift > 1e-9 || purity > 1.0 + 1e-6) {
            std::ostringstream os;
            os << "propagate: step-size instability at t = " << t + h << " (trace drift " << drift << ", purity " << purity
               << "); try dt <= " << 0.5 * h;
            throw SolverError(os.str());
        }
        if ((j + 1) % sample_every == 0 || j + 1 == nsteps) {
            tr.times.push_back((j + 1) * h);
            tr.states.push_back(rho);
        }
    }
    return tr;
}

// ---- full point pipeline ----

struct PointSolution {
    SystemSpec spec;
    SambeConfig sambe;
    HamiltonianFourier hamiltonian;
    JumpComponentTable jumps;
    LiouvillianFourier liouvillian;
    HeatCurrentGenerator heat;
    QuasiSteadyState state;

    const FloquetDecomposition& floquet() const { return *jumps.decomposition; }
};

inline PointSolution solve_point(const SystemSpec& spec, const SambeConfig& sambe) {
    spec.validate();
    PointSolution p;
    p.spec = spec;
    p.sambe = sambe;
    p.hamiltonian = build_hamiltonian_fourier(spec);
    const auto dec = solve_floquet(p.hamiltonian, spec.drive_frequency, sambe);
    p.jumps = jump_components(dec, coupling_operators());
    const std::array<BathSpec, 2> baths{spec.bath_a, spec.bath_b};
    p.liouvillian = build_liouvillian(p.jumps, baths, p.hamiltonian);
    p.heat = heat_current_generator(p.jumps, baths);
    p.state = solve_quasi_steady_state(p.liouvillian, spec.drive_frequency, sambe);
    return p;
}

// ---- truncation convergence ----

struct ConvergenceRow {
    int cutoff = 0;
    std::array<double, 4> quasienergies{};
    double quasienergy_shift = std::numeric_limits<double>::quiet_NaN(); // vs previous cutoff
    double rho0_distance = std::numeric_limits<double>::quiet_NaN();     // trace distance vs previous cutoff
    double mean_concurrence = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::optional<int> converged_cutoff; // first c_j with distance(c_j, c_{j+1}) < tolerance
    double tolerance = 1e-8;
};

inline double mean_concurrence(const QuasiSteadyState& q, int samples = 64) {
    double s = 0.0;
    for (int j = 0; j < samples; ++j) s += concurrence(density_at_time(q, q.period() * j / samples));
    return s / samples;
}

// Runs solve_point at each cutoff in order. With stop_when_converged the loop ends at the
// first successive pair within tolerance; solutions are returned through `keep` if given.
inline ConvergenceReport convergence_study(const SystemSpec& spec, const std::vector<int>& cutoffs, double tolerance = 1e-8,
                                           bool stop_when_converged = false, std::vector<PointSolution>* keep = nullptr) {
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw std::invalid_argument("convergence_study: cutoffs must be ascending");
    ConvergenceReport rep;
    rep.tolerance = tolerance;
    std::optional<PointSolution> prev;
    for (int c : cutoffs) {
        ConvergenceRow row;
        row.cutoff = c;
        std::optional<PointSolution> cur;
        try {
            SambeConfig cfg;
            cfg.cutoff = c;
            cur = solve_point(spec, cfg);
            row.quasienergies = cur->floquet().quasienergies;
            row.residual = cur->state.residual;
            row.mean_concurrence = mean_concurrence(cur->state);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (cur && prev) {
            double shift = 0.0;
            for (std::size_t r = 0; r < 4; ++r)
                shift = std::max(shift, std::abs(std::remainder(row.quasienergies[r] - prev->floquet().quasienergies[r],
                                                                spec.drive_frequency)));
            row.quasienergy_shift = shift;
            row.rho0_distance = trace_distance(cur->state.rho[0], prev->state.rho[0]);
            if (!rep.converged_cutoff && row.rho0_distance < tolerance) rep.converged_cutoff = prev->sambe.cutoff;
        }
        rep.rows.push_back(row);
        if (keep && cur) keep->push_back(*cur);
        prev = cur;
        if (stop_when_converged && rep.converged_cutoff) break;
    }
    return rep;
}

} // namespace fgme
