#pragma once

#include "fgme/types.hpp"

namespace fgme {

// Wootters concurrence. Eigenvalues of rho in [-1e-5, 0) are clipped to zero before the
// square root; anything more negative is not a density matrix.
inline double concurrence(const Mat4& rho_in) {
    const cplx tr = rho_in.trace();
    if (std::abs(tr - 1.0) > 1e-6) throw std::invalid_argument("concurrence: trace deviates from 1 by more than 1e-6");
    const Mat4 rho = 0.5 * (rho_in + rho_in.adjoint());

    Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
    Eigen::Vector4d lam = es.eigenvalues();
    if (lam.minCoeff() < -1e-5) throw std::invalid_argument("concurrence: input has eigenvalue below -1e-5");
    const Mat4 sq = es.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();

    const Mat4 yy = pauli::kron(pauli::sy(), pauli::sy());
    const Mat4 flipped = yy * rho.conjugate() * yy;
    Mat4 r = sq * flipped * sq;
    r = 0.5 * (r + r.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat4> rs(r, Eigen::EigenvaluesOnly);
    Eigen::Vector4d l = rs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(l.data(), l.data() + 4, std::greater<>());
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

} // namespace fgme
