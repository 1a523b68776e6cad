#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgme {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

// Failure of a numerical stage (non-unique kernel, ambiguous folding, unstable step).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested truncation or harmonic window cannot be honoured.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Efficiency above the Carnot bound: the generator is wrong somewhere.
class ThermodynamicInconsistency : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coefficients c_k of f(t) = sum_k c_k e^{i k w t} on a contiguous index window.
// Reads outside the window return zero.
template <class T>
class FourierSeries {
public:
    FourierSeries() = default;
    FourierSeries(int lo, int hi, const T& zero) : lo_(lo), zero_(zero), c_(std::size_t(hi - lo + 1), zero) {
        if (hi < lo) throw std::invalid_argument("FourierSeries: empty index window");
    }

    int min_index() const { return lo_; }
    int max_index() const { return lo_ + int(c_.size()) - 1; }
    bool empty() const { return c_.empty(); }
    bool contains(int k) const { return !c_.empty() && k >= lo_ && k <= max_index(); }

    const T& operator[](int k) const { return contains(k) ? c_[std::size_t(k - lo_)] : zero_; }
    T& coeff(int k) {
        if (!contains(k)) throw std::out_of_range("FourierSeries: index " + std::to_string(k) + " outside window");
        return c_[std::size_t(k - lo_)];
    }
    const T& zero() const { return zero_; }

    // f evaluated at phase theta = w t
    T at_phase(double theta) const {
        T out = zero_;
        for (int k = lo_; k <= max_index(); ++k) out += (*this)[k] * std::polar(1.0, k * theta);
        return out;
    }
    T at(double t, double omega) const { return at_phase(omega * t); }

    // re-index so that new[k - shift] = old[k]
    FourierSeries shifted(int shift) const {
        FourierSeries out = *this;
        out.lo_ = lo_ - shift;
        return out;
    }

private:
    int lo_ = 0;
    T zero_{};
    std::vector<T> c_;
};

// ---- Pauli algebra in the basis |ee>, |eg>, |ge>, |gg>, qubit A first ----

namespace pauli {

inline Eigen::Matrix2cd sz() { Eigen::Matrix2cd m; m << 1, 0, 0, -1; return m; }
inline Eigen::Matrix2cd sx() { Eigen::Matrix2cd m; m << 0, 1, 1, 0; return m; }
inline Eigen::Matrix2cd sy() { Eigen::Matrix2cd m; m << 0, -I, I, 0; return m; }
// sigma_+ = |e><g|
inline Eigen::Matrix2cd sp() { Eigen::Matrix2cd m; m << 0, 1, 0, 0; return m; }
inline Eigen::Matrix2cd sm() { return sp().adjoint(); }

inline Mat4 kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

inline Mat4 on_a(const Eigen::Matrix2cd& op) { return kron(op, Eigen::Matrix2cd::Identity()); }
inline Mat4 on_b(const Eigen::Matrix2cd& op) { return kron(Eigen::Matrix2cd::Identity(), op); }

} // namespace pauli

// ---- column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X) ----

inline Mat16 kron4(const Mat4& a, const Mat4& b) {
    Mat16 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return out;
}

inline Mat16 left_mul(const Mat4& a) { return kron4(Mat4::Identity(), a); }
inline Mat16 right_mul(const Mat4& b) { return kron4(b.transpose(), Mat4::Identity()); }
// rho -> A rho B
inline Mat16 sandwich(const Mat4& a, const Mat4& b) { return kron4(b.transpose(), a); }

inline Vec16 vec(const Mat4& m) { return Eigen::Map<const Vec16>(m.data()); }
inline Mat4 unvec(const Vec16& v) { return Eigen::Map<const Mat4>(v.data()); }

// row functional with trace(X) = tr_row() * vec(X)
inline Eigen::Matrix<cplx, 1, 16> trace_row() {
    Eigen::Matrix<cplx, 1, 16> r = Eigen::Matrix<cplx, 1, 16>::Zero();
    for (int i = 0; i < 4; ++i) r(5 * i) = 1.0;
    return r;
}

inline double trace_norm_hermitian(const Mat4& m) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(Mat4(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

// 0.5 * ||a - b||_1 for Hermitian arguments
inline double trace_distance(const Mat4& a, const Mat4& b) { return 0.5 * trace_norm_hermitian(a - b); }

} // namespace fgme
