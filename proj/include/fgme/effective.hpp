#pragma once

#include "fgme/model.hpp"

namespace fgme {

// J0 to ~1e-15 absolute: power series near zero, Miller backward recurrence with the
// normalization J0 + 2 sum J_2k = 1 up to 25, Hankel asymptotic expansion beyond.
inline double bessel_j0(double x) {
    x = std::abs(x);
    if (x <= 2.0) {
        const double q = 0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int m = 1; m < 40; ++m) {
            term *= -q / (double(m) * m);
            sum += term;
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }
    if (x <= 25.0) {
        const int start = 2 * (int(x) / 2) + 64;
        double jp1 = 0.0, j = 1e-30, norm = 0.0, j0 = 0.0;
        for (int k = start; k >= 1; --k) {
            const double jm1 = (2.0 * k / x) * j - jp1;
            jp1 = j;
            j = jm1;
            if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
            if (std::abs(j) > 1e250) {
                j *= 1e-250, jp1 *= 1e-250, norm *= 1e-250;
            }
        }
        j0 = j;
        norm += j0;
        return j0 / norm;
    }
    // Hankel: J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4
    double p = 0.0, q = 0.0, a = 1.0, last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 60; ++k) {
        if (k > 0) a *= -double((2 * k - 1) * (2 * k - 1)) / (8.0 * k * x);
        if (std::abs(a) > last) break;
        last = std::abs(a);
        // a_k / x^k with signs folded in; even k feed P, odd k feed Q
        const int r = k % 4;
        if (r == 0) p += a;
        else if (r == 1) q += a;
        else if (r == 2) p -= a;
        else q -= a;
        if (std::abs(a) < 1e-17) break;
    }
    const double chi = x - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Coefficients of sz^A, sz^B, s+s-, s-s+, sx^A B_A, sx^B B_B, sy^A B_A
using FlowCoefficients = std::array<cplx, 7>;

struct FlowState {
    double drive_frequency = 0.0;
    int s_steps = 0;
    int t_samples = 0;
    std::vector<double> times;            // t_j = j T / t_samples
    std::vector<FlowCoefficients> values; // index s_index * t_samples + t_index

    const FlowCoefficients& at(int s_index, int t_index) const {
        return values[std::size_t(s_index) * std::size_t(t_samples) + std::size_t(t_index)];
    }
    const FlowCoefficients& terminal(int t_index) const { return at(s_steps, t_index); }

    // (1/T) int_0^T C(1, t) dt on the uniform periodic grid
    FlowCoefficients averaged_terminal() const {
        FlowCoefficients avg{};
        for (int j = 0; j < t_samples; ++j)
            for (std::size_t i = 0; i < 7; ++i) avg[i] += terminal(j)[i];
        for (auto& v : avg) v /= double(t_samples);
        return avg;
    }
};

namespace detail {

inline FlowCoefficients flow_rhs(const SystemSpec& spec, double t, const FlowCoefficients& c) {
    const double k = spec.drive_amplitude, w = spec.drive_frequency;
    const double a = k * std::sin(w * t) / w;
    FlowCoefficients d{};
    d[0] = -0.5 * k * std::cos(w * t);
    d[1] = 0.0;
    d[2] = I * a * c[2];
    d[3] = -I * a * c[3];
    d[4] = a * c[6];
    d[5] = 0.0;
    d[6] = -a * c[4];
    return d;
}

inline FlowCoefficients axpy(const FlowCoefficients& x, double h, const FlowCoefficients& y) {
    FlowCoefficients out;
    for (std::size_t i = 0; i < 7; ++i) out[i] = x[i] + h * y[i];
    return out;
}

} // namespace detail

inline FlowCoefficients flow_initial(const SystemSpec& spec, double t) {
    return {0.5 * (spec.omega_a + spec.drive_amplitude * std::cos(spec.drive_frequency * t)), 0.5 * spec.omega_b, spec.lambda,
            spec.lambda, 1.0, 1.0, 0.0};
}

// closed-form solution at flow parameter s
inline FlowCoefficients flow_closed_form(const SystemSpec& spec, double s, double t) {
    const double k = spec.drive_amplitude, w = spec.drive_frequency;
    const double a = k * s * std::sin(w * t) / w;
    return {0.5 * (spec.omega_a + k * std::cos(w * t) - k * s * std::cos(w * t)), 0.5 * spec.omega_b,
            spec.lambda * std::polar(1.0, a), spec.lambda * std::polar(1.0, -a), std::cos(a), 1.0, -std::sin(a)};
}

// RK4 in s over [0, 1] at each time sample
inline FlowState integrate_flow(const SystemSpec& spec, int s_steps = 400, int t_samples = 64) {
    spec.validate();
    if (s_steps < 100) throw std::invalid_argument("integrate_flow: s_steps must be >= 100");
    if (t_samples < 1) throw std::invalid_argument("integrate_flow: t_samples must be >= 1");
    FlowState fs;
    fs.drive_frequency = spec.drive_frequency;
    fs.s_steps = s_steps;
    fs.t_samples = t_samples;
    fs.values.resize(std::size_t(s_steps + 1) * std::size_t(t_samples));
    const double h = 1.0 / s_steps;
    for (int j = 0; j < t_samples; ++j) {
        const double t = spec.period() * j / t_samples;
        fs.times.push_back(t);
        FlowCoefficients c = flow_initial(spec, t);
        fs.values[std::size_t(j)] = c;
        for (int n = 0; n < s_steps; ++n) {
            // the right-hand side does not depend on s explicitly
            const auto k1 = detail::flow_rhs(spec, t, c);
            const auto k2 = detail::flow_rhs(spec, t, detail::axpy(c, 0.5 * h, k1));
            const auto k3 = detail::flow_rhs(spec, t, detail::axpy(c, 0.5 * h, k2));
            const auto k4 = detail::flow_rhs(spec, t, detail::axpy(c, h, k3));
            for (std::size_t i = 0; i < 7; ++i) c[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            fs.values[std::size_t(n + 1) * std::size_t(t_samples) + std::size_t(j)] = c;
        }
        const double norm = std::norm(c[4]) + std::norm(c[6]);
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8) {
            std::ostringstream os;
            os << "integrate_flow: C5^2 + C7^2 = " << norm << " at t = " << t << " after " << s_steps
               << " steps; increase s_steps";
            throw SolverError(os.str());
        }
    }
    return fs;
}

struct EffectiveHamiltonian {
    double half_gap_a = 0.0;
    double half_gap_b = 0.0;
    double lambda_eff = 0.0;
    double coupling_scale_a = 1.0; // multiplies sx^A B_A
    double coupling_scale_b = 1.0; // multiplies sx^B B_B

    // system part, same basis as the model
    Mat4 system_matrix() const {
        using namespace pauli;
        return half_gap_a * on_a(sz()) + half_gap_b * on_b(sz()) + lambda_eff * (on_a(sp()) * on_b(sm()) + on_a(sm()) * on_b(sp()));
    }
};

inline EffectiveHamiltonian effective_hamiltonian(const SystemSpec& spec) {
    if (!(spec.drive_frequency > 0.0)) throw std::invalid_argument("effective_hamiltonian: drive frequency must be > 0");
    const double j0 = bessel_j0(spec.drive_amplitude / spec.drive_frequency);
    return {0.5 * spec.omega_a, 0.5 * spec.omega_b, spec.lambda * j0, j0, 1.0};
}

} // namespace fgme
