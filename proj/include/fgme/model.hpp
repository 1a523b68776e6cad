#pragma once

#include "fgme/types.hpp"

#include <limits>

namespace fgme {

struct BathSpec {
    double temperature = 0.5;
    double coupling = 1e-3;           // d
    double reference_frequency = 1.0; // omega_0

    void validate(const std::string& where = "bath") const {
        if (!(temperature > 0.0) || !std::isfinite(temperature))
            throw std::invalid_argument(where + ".temperature: must be finite and > 0");
        if (!(coupling >= 0.0) || !std::isfinite(coupling))
            throw std::invalid_argument(where + ".coupling: must be finite and >= 0");
        if (!(reference_frequency > 0.0) || !std::isfinite(reference_frequency))
            throw std::invalid_argument(where + ".reference_frequency: must be finite and > 0");
    }
};

// Built-in defaults: gaps 0.5, exchange 0.25, d = 1e-3, omega_0 = 1, baths at 0.5 and 0.1.
struct SystemSpec {
    double omega_a = 0.5;
    double omega_b = 0.5;
    double lambda = 0.25;
    double drive_amplitude = 0.0;  // K
    double drive_frequency = 0.5;  // omega_L
    BathSpec bath_a{0.5, 1e-3, 1.0};
    BathSpec bath_b{0.1, 1e-3, 1.0};

    void validate() const {
        const std::pair<const char*, double> finite_fields[] = {
            {"system.omega_a", omega_a}, {"system.omega_b", omega_b}, {"system.lambda", lambda},
            {"drive.amplitude", drive_amplitude}};
        for (const auto& [name, v] : finite_fields)
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + ": must be finite");
        if (!(drive_frequency > 0.0) || !std::isfinite(drive_frequency))
            throw std::invalid_argument("drive.frequency: must be finite and > 0");
        bath_a.validate("bath_a");
        bath_b.validate("bath_b");
    }

    double period() const { return 2.0 * std::numbers::pi / drive_frequency; }
    const BathSpec& bath(int i) const { return i == 0 ? bath_a : bath_b; }
};

using HamiltonianFourier = FourierSeries<Mat4>;

inline Mat4 static_hamiltonian(const SystemSpec& s) {
    using namespace pauli;
    return 0.5 * s.omega_a * on_a(sz()) + 0.5 * s.omega_b * on_b(sz()) +
           s.lambda * (on_a(sp()) * on_b(sm()) + on_a(sm()) * on_b(sp()));
}

// H_S(t) = H_0 + (K/2) cos(w_L t) sz^A, stored as H_{-1}, H_0, H_{+1}
inline HamiltonianFourier build_hamiltonian_fourier(const SystemSpec& s) {
    s.validate();
    HamiltonianFourier hf(-1, 1, Mat4::Zero());
    hf.coeff(0) = static_hamiltonian(s);
    const Mat4 h1 = 0.25 * s.drive_amplitude * pauli::on_a(pauli::sz());
    hf.coeff(1) = h1;
    hf.coeff(-1) = h1.adjoint();
    return hf;
}

// The two coupling operators S_A = sx^A, S_B = sx^B
inline std::array<Mat4, 2> coupling_operators() {
    return {pauli::on_a(pauli::sx()), pauli::on_b(pauli::sx())};
}

// Ohmic J(w) = d w / w0. The odd extension to w < 0 coincides with the same line.
inline double spectral_density(const BathSpec& b, double omega) {
    return b.coupling * omega / b.reference_frequency;
}

inline double bose_occupation(double temperature, double omega) {
    if (!(temperature > 0.0)) throw std::invalid_argument("bose_occupation: temperature must be > 0");
    if (omega == 0.0) throw std::domain_error("bose_occupation: pole at omega = 0, use bath_rate for the finite product");
    return 1.0 / std::expm1(omega / temperature);
}

struct BathRate {
    double emission;   // J(w) [1 + N(w)]
    double absorption; // J(w) N(w)
};

namespace detail {
// x / (e^x - 1), finite for every real x
inline double x_over_expm1(double x) {
    if (x == 0.0) return 1.0;
    if (x > 700.0) return x * std::exp(-x);
    return x / std::expm1(x);
}
} // namespace detail

// Both products written as (d T / w0) g(+-w/T) with g(x) = x/(e^x - 1);
// this is exact and has the limit d T / w0 at w = 0.
inline BathRate bath_rate(const BathSpec& b, double omega) {
    const double scale = b.coupling * b.temperature / b.reference_frequency;
    const double x = omega / b.temperature;
    return {scale * detail::x_over_expm1(-x), scale * detail::x_over_expm1(x)};
}

} // namespace fgme
