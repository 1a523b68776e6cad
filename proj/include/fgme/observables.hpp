#pragma once

#include "fgme/steady.hpp"

namespace fgme {

enum class Mode { engine, pump, transition, idle, other };

inline const char* to_string(Mode m) {
    switch (m) {
    case Mode::engine: return "engine";
    case Mode::pump: return "pump";
    case Mode::transition: return "transition";
    case Mode::idle: return "idle";
    case Mode::other: return "other";
    }
    return "other";
}

// Qdot_i(t) = Tr(D_i(t) rho(t)), positive when heat flows from bath i into the system
inline double heat_current(const QuasiSteadyState& q, const HeatCurrentGenerator& gen, int bath, double t) {
    return (trace_row() * (gen.at(bath, t) * vec(density_at_time(q, t))))(0).real();
}

// period average by Fourier pairing: only D_k rho_{-k} survives
inline double heat_current_average(const QuasiSteadyState& q, const HeatCurrentGenerator& gen, int bath) {
    const auto& d = gen.per_bath[std::size_t(bath)];
    cplx s = 0.0;
    for (int k = d.min_index(); k <= d.max_index(); ++k) {
        if (!q.rho.contains(-k)) continue;
        s += (trace_row() * (d[k] * vec(q.rho[-k])))(0);
    }
    return s.real();
}

// dW/dt = Tr(rho(t) dH/dt), positive when the drive does work on the system
inline double work_rate(const QuasiSteadyState& q, const HamiltonianFourier& hf, double t) {
    Mat4 dh = Mat4::Zero();
    for (int k = hf.min_index(); k <= hf.max_index(); ++k)
        dh += (I * (k * q.drive_frequency)) * hf[k] * std::polar(1.0, k * q.drive_frequency * t);
    return (density_at_time(q, t) * dh).trace().real();
}

inline double work_rate_average(const QuasiSteadyState& q, const HamiltonianFourier& hf) {
    cplx s = 0.0;
    for (int k = hf.min_index(); k <= hf.max_index(); ++k)
        s += (q.rho[-k] * ((I * (k * q.drive_frequency)) * hf[k])).trace();
    return s.real();
}

// `other` covers sign patterns outside the three machine regimes, e.g. plain
// conduction with no work exchanged.
inline Mode classify_mode(double qa, double qb, double w, double deadband = 1e-12) {
    if (deadband < 0.0) throw std::invalid_argument("classify_mode: deadband must be >= 0");
    if (qa > deadband && qb < -deadband && w < -deadband) return Mode::engine;
    if (qa < -deadband && w > deadband) return Mode::pump;
    if (qa > deadband && qb < -deadband && w > deadband) return Mode::transition;
    if (std::abs(qa) <= deadband && std::abs(qb) <= deadband && std::abs(w) <= deadband) return Mode::idle;
    return Mode::other;
}

inline double carnot_efficiency(double t_hot, double t_cold) { return 1.0 - t_cold / t_hot; }

// engine: |W/Q_A| <= eta, pump: |Q_A/W| <= 1/eta
inline std::optional<double> efficiency(Mode mode, double qa, double w, double t_hot, double t_cold) {
    if (mode != Mode::engine && mode != Mode::pump) return std::nullopt;
    const double eta = carnot_efficiency(t_hot, t_cold);
    if (mode == Mode::engine) {
        const double e = std::abs(w / qa);
        if (e > eta + 1e-9)
            throw ThermodynamicInconsistency("efficiency: engine efficiency " + std::to_string(e) + " exceeds Carnot " + std::to_string(eta));
        return e;
    }
    const double cop = std::abs(qa / w);
    if (cop > 1.0 / eta + 1e-9)
        throw ThermodynamicInconsistency("efficiency: pump coefficient " + std::to_string(cop) + " exceeds 1/eta = " +
                                         std::to_string(1.0 / eta));
    return cop;
}

struct ThermoReport {
    double qdot_a_avg = 0.0;
    double qdot_b_avg = 0.0;
    double work_avg = 0.0;        // -(Q_A + Q_B)
    double work_avg_direct = 0.0; // Tr(rho dH/dt)
    double balance_residual = 0.0; // Q_A + Q_B + W_direct
    Mode mode = Mode::idle;
    std::optional<double> efficiency;
    double carnot = 0.0;
};

// Mode and efficiency use the direct work Tr(rho dH/dt). The balance form -(Q_A + Q_B) also
// carries the small non-conservation of the non-secular generator, which at K = 0 would turn
// plain conduction into a spurious engine. The Carnot factor uses max/min of the temperatures.
inline ThermoReport thermo_report(const QuasiSteadyState& q, const HeatCurrentGenerator& gen, const HamiltonianFourier& hf,
                                  const std::array<BathSpec, 2>& baths, double deadband = 1e-12) {
    ThermoReport r;
    r.qdot_a_avg = heat_current_average(q, gen, 0);
    r.qdot_b_avg = heat_current_average(q, gen, 1);
    r.work_avg = -(r.qdot_a_avg + r.qdot_b_avg);
    r.work_avg_direct = work_rate_average(q, hf);
    r.balance_residual = r.qdot_a_avg + r.qdot_b_avg + r.work_avg_direct;
    r.mode = classify_mode(r.qdot_a_avg, r.qdot_b_avg, r.work_avg_direct, deadband);
    const double th = std::max(baths[0].temperature, baths[1].temperature);
    const double tc = std::min(baths[0].temperature, baths[1].temperature);
    r.carnot = carnot_efficiency(th, tc);
    r.efficiency = efficiency(r.mode, r.qdot_a_avg, r.work_avg_direct, th, tc);
    return r;
}

inline ThermoReport thermo_report(const PointSolution& p, double deadband = 1e-12) {
    return thermo_report(p.state, p.heat, p.hamiltonian, {p.spec.bath_a, p.spec.bath_b}, deadband);
}

struct ConcurrenceProfile {
    std::vector<std::pair<double, double>> samples; // (t, C)
    double entangled_fraction = 0.0;                // share of samples with C > threshold
    double mean = 0.0;                              // trapezoid over the closed period
};

inline ConcurrenceProfile concurrence_profile(const QuasiSteadyState& q, int n_samples, double threshold = 1e-12) {
    if (n_samples < 2) throw std::invalid_argument("concurrence_profile: n_samples must be >= 2");
    ConcurrenceProfile p;
    const double period = q.period();
    int hits = 0;
    for (int j = 0; j < n_samples; ++j) {
        const double t = period * j / n_samples;
        const double c = concurrence(density_at_time(q, t));
        p.samples.emplace_back(t, c);
        if (c > threshold) ++hits;
    }
    // periodic trapezoid: the endpoint t = T repeats t = 0
    double s = 0.0;
    for (int j = 0; j < n_samples; ++j) s += 0.5 * (p.samples[std::size_t(j)].second + p.samples[std::size_t((j + 1) % n_samples)].second);
    p.mean = s / n_samples;
    p.entangled_fraction = double(hits) / n_samples;
    return p;
}

} // namespace fgme
