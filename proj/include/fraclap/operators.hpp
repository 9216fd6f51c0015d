#pragma once

// Half-Laplacian with Neumann boundary conditions, realized spectrally.
//
// On the cosine eigenbasis, -d^2/dx^2 phi_k = lambda_k phi_k with
// lambda_k = (k pi)^2, and the operator I acts diagonally:
//   I(sum c_k phi_k) = -sum c_k sqrt(lambda_k) phi_k.
// Consequences used below: I(I(u)) = -u'' on the resolved band, I annihilates
// constants, and I has zero mean. The same object admits two non-spectral
// realizations used for cross-validation: a singular integral kernel nu(x,y)
// and the normal trace of the harmonic extension to the half-strip.

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fraclap/fields.hpp"

namespace fraclap {

template <typename Scalar>
Scalar eigenvalue(Index k) {
    const Scalar kpi = Scalar(k) * std::numbers::pi_v<Scalar>;
    return kpi * kpi;
}

// I(u): multiply mode k by -sqrt(lambda_k) = -k pi. Mode 0 is annihilated,
// so the result always has zero mean.
template <typename Scalar>
SpectralField<Scalar> apply_I(const SpectralField<Scalar>& u) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    SpectralField<Scalar> out = SpectralField<Scalar>::zero(u.modes());
    for (Index k = 1; k < u.modes(); ++k)
        out.coeffs[k] = -Scalar(k) * pi * u.coeffs[k];
    return out;
}

// d/dx I(u) as a sine series: combining the two diagonal actions gives
// sine coefficients s_k = lambda_k c_k (the two sign flips cancel).
template <typename Scalar>
SineField<Scalar> apply_dxI(const SpectralField<Scalar>& u) {
    SineField<Scalar> s = SineField<Scalar>::zero(u.modes());
    for (Index k = 1; k < u.modes(); ++k)
        s.coeffs[k] = eigenvalue<Scalar>(k) * u.coeffs[k];
    return s;
}

// Solve -I(u) = g. Solvable only for mean-zero g (I has no constant range);
// the mean-zero solution is u_k = g_k / (k pi), u_0 = 0.
template <typename Scalar>
SpectralField<Scalar> inverse_I(const SpectralField<Scalar>& g) {
    const Scalar tol_mean = Scalar(1e-10) * (Scalar(1) + g.l2_norm());
    if (std::abs(g.mean()) > tol_mean)
        throw std::invalid_argument(
            "inverse_I: right-hand side must have zero mean, |g_0| = " +
            std::to_string(static_cast<double>(std::abs(g.mean()))));
    const Scalar pi = std::numbers::pi_v<Scalar>;
    SpectralField<Scalar> u = SpectralField<Scalar>::zero(g.modes());
    for (Index k = 1; k < g.modes(); ++k)
        u.coeffs[k] = g.coeffs[k] / (Scalar(k) * pi);
    return u;
}

// Solve -I(v) + integral(v) = g. The mean of g fixes integral(v), after which
// the fluctuating part reduces to inverse_I.
template <typename Scalar>
SpectralField<Scalar> inverse_I_shifted(const SpectralField<Scalar>& g) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    SpectralField<Scalar> v = SpectralField<Scalar>::zero(g.modes());
    if (g.modes() > 0) v.coeffs[0] = g.mean();
    for (Index k = 1; k < g.modes(); ++k)
        v.coeffs[k] = g.coeffs[k] / (Scalar(k) * pi);
    return v;
}

// Integral kernel of the quadratic form of I on (0,1):
//   nu(x,y) = (pi/2) [ 1/(1 - cos(pi(x-y))) + 1/(1 - cos(pi(x+y))) ].
// Singular on the diagonal x = y and on the reflected diagonals x+y in {0,2}.
template <typename Scalar>
Scalar kernel_nu(Scalar x, Scalar y) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar d1 = Scalar(1) - std::cos(pi * (x - y));
    const Scalar d2 = Scalar(1) - std::cos(pi * (x + y));
    if (d1 == Scalar(0) || d2 == Scalar(0))
        throw std::domain_error("kernel_nu: evaluation on the singular set");
    return (pi / Scalar(2)) * (Scalar(1) / d1 + Scalar(1) / d2);
}

// Kernel-side quadratic form (1/2) integral (u(x)-u(y))^2 nu(x,y) dx dy by the
// midpoint product rule, skipping the singular diagonal cells i = j. The
// omitted diagonal band carries O(1/M) of the integral, so this converges to
// the spectral H^{1/2} semi-norm at first order; it is a deliberately
// independent cross-check, not a fast path.
template <typename Scalar>
Scalar quadratic_form_kernel(const NodalField<Scalar>& u, const Grid<Scalar>& grid) {
    if (u.size() != grid.size)
        throw std::invalid_argument("quadratic_form_kernel: field/grid mismatch");
    const Index M = grid.size;
    Scalar sum = Scalar(0);
    for (Index i = 0; i < M; ++i) {
        for (Index j = i + 1; j < M; ++j) {
            const Scalar du = u.values[i] - u.values[j];
            sum += du * du * kernel_nu(grid.nodes[i], grid.nodes[j]);
        }
    }
    // the i<j half-sum counts each unordered pair once; the form wants
    // (1/2) * full double sum = the half-sum
    return sum / (Scalar(M) * Scalar(M));
}

// Harmonic extension to the half-strip: v(x,y) = sum c_k phi_k(x) e^{-k pi y}.
// Its normal trace -d/dy v(x,0) equals -I(u), which is what the one-sided
// quotient (v(.,h) - v(.,0))/h cross-checks.
template <typename Scalar>
SpectralField<Scalar> harmonic_extension(const SpectralField<Scalar>& u, Scalar y) {
    if (y < Scalar(0))
        throw std::domain_error("harmonic_extension: y must be >= 0");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    SpectralField<Scalar> v = u;
    for (Index k = 1; k < u.modes(); ++k)
        v.coeffs[k] *= std::exp(-Scalar(k) * pi * y);
    return v;
}

// Squared spectral semi-norm sum_{k>=1} c_k^2 lambda_k^s for the four
// exponents the solver tracks (s = 1/2, 1, 3/2, 2).
template <typename Scalar>
Scalar seminorm_sq(const SpectralField<Scalar>& u, Scalar s) {
    const bool supported = s == Scalar(0.5) || s == Scalar(1) ||
                           s == Scalar(1.5) || s == Scalar(2);
    if (!supported)
        throw std::invalid_argument(
            "seminorm_sq: s must be one of 1/2, 1, 3/2, 2");
    Scalar sum = Scalar(0);
    for (Index k = 1; k < u.modes(); ++k)
        sum += u.coeffs[k] * u.coeffs[k] * std::pow(eigenvalue<Scalar>(k), s);
    return sum;
}

}  // namespace fraclap
