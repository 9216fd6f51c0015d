#pragma once

// Field types for the Neumann cosine pseudospectral discretization.
//
// Basis conventions on (0,1):
//   phi_0(x) = 1,  phi_k(x) = sqrt(2) cos(k pi x)   (orthonormal in L2)
//   psi_k(x) = sqrt(2) sin(k pi x),  k >= 1
// A SpectralField stores cosine coefficients c_0..c_{N-1}; c_0 is the mean.
// A SineField stores sine coefficients with index = mode; slot 0 is kept so
// that indexing matches the cosine side, and it is identically zero.
//
// Transforms are plain quadrature sums on the midpoint grid. For k,l < M the
// discrete cosine products satisfy (1/M) sum_j phi_k(x_j) phi_l(x_j) =
// delta_kl exactly, so analysis/synthesis round-trip at machine precision as
// long as N <= M. Construction enforces M >= 2N to leave anti-aliasing
// headroom for pointwise products of band-limited fields.

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fraclap/grid.hpp"

namespace fraclap {

template <typename Scalar = double>
struct SpectralField {
    Eigen::VectorX<Scalar> coeffs;     // c_0..c_{N-1}

    SpectralField() = default;
    explicit SpectralField(Eigen::VectorX<Scalar> c) : coeffs(std::move(c)) {}
    static SpectralField zero(Index N) {
        return SpectralField(Eigen::VectorX<Scalar>::Zero(N));
    }

    Index modes() const { return coeffs.size(); }
    Scalar mean() const { return coeffs.size() > 0 ? coeffs[0] : Scalar(0); }
    Scalar l2_norm() const { return coeffs.norm(); }
};

template <typename Scalar = double>
struct NodalField {
    Eigen::VectorX<Scalar> values;     // u(x_j), one per grid node

    NodalField() = default;
    explicit NodalField(Eigen::VectorX<Scalar> v) : values(std::move(v)) {}

    Index size() const { return values.size(); }
};

template <typename Scalar = double>
struct SineField {
    Eigen::VectorX<Scalar> coeffs;     // s_k, slot 0 unused and zero

    SineField() = default;
    explicit SineField(Eigen::VectorX<Scalar> s) : coeffs(std::move(s)) {}
    static SineField zero(Index N) {
        return SineField(Eigen::VectorX<Scalar>::Zero(N));
    }

    Index modes() const { return coeffs.size(); }
    Scalar l2_norm() const { return coeffs.norm(); }
};

// Sampled basis tables for a fixed (N, M) pair. Building the tables costs
// O(M N) trig evaluations; every transform afterwards is a single mat-vec,
// which is what the Newton loop hammers on.
template <typename Scalar = double>
struct Basis {
    Grid<Scalar> grid;
    Index modes = 0;                         // N
    Eigen::MatrixX<Scalar> cosine_table;     // M x N, phi_k(x_j)
    Eigen::MatrixX<Scalar> sine_table;       // M x N, psi_k(x_j), column 0 zero

    static Basis make(Index N, Index M) {
        if (N < 1)
            throw std::invalid_argument("Basis::make: N must be >= 1");
        if (M < 2 * N)
            throw std::invalid_argument(
                "Basis::make: M >= 2N required for dealiased products");
        Basis b;
        b.grid = Grid<Scalar>::midpoint(M);
        b.modes = N;
        b.cosine_table.resize(M, N);
        b.sine_table.resize(M, N);
        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar rt2 = std::sqrt(Scalar(2));
        for (Index j = 0; j < M; ++j) {
            b.cosine_table(j, 0) = Scalar(1);
            b.sine_table(j, 0) = Scalar(0);
            for (Index k = 1; k < N; ++k) {
                const Scalar arg = Scalar(k) * pi * b.grid.nodes[j];
                b.cosine_table(j, k) = rt2 * std::cos(arg);
                b.sine_table(j, k) = rt2 * std::sin(arg);
            }
        }
        return b;
    }
};

namespace detail {
template <typename Scalar>
void require_nodal_match(const NodalField<Scalar>& u, const Basis<Scalar>& b,
                         const char* who) {
    if (u.size() != b.grid.size)
        throw std::invalid_argument(std::string(who) +
                                    ": field length does not match grid");
}
template <typename Scalar>
void require_modal_match(Index modes, const Basis<Scalar>& b, const char* who) {
    if (modes != b.modes)
        throw std::invalid_argument(std::string(who) +
                                    ": coefficient count does not match basis");
}
}  // namespace detail

// Analysis: c_k = (1/M) sum_j u(x_j) phi_k(x_j).
template <typename Scalar>
SpectralField<Scalar> to_spectral(const NodalField<Scalar>& u,
                                  const Basis<Scalar>& basis) {
    detail::require_nodal_match(u, basis, "to_spectral");
    Eigen::VectorX<Scalar> c =
        (basis.cosine_table.transpose() * u.values) / Scalar(basis.grid.size);
    return SpectralField<Scalar>(std::move(c));
}

// Synthesis: u(x_j) = sum_k c_k phi_k(x_j).
template <typename Scalar>
NodalField<Scalar> to_nodal(const SpectralField<Scalar>& u,
                            const Basis<Scalar>& basis) {
    detail::require_modal_match(u.modes(), basis, "to_nodal");
    return NodalField<Scalar>(basis.cosine_table * u.coeffs);
}

template <typename Scalar>
SineField<Scalar> nodal_to_sine(const NodalField<Scalar>& q,
                                const Basis<Scalar>& basis) {
    detail::require_nodal_match(q, basis, "nodal_to_sine");
    Eigen::VectorX<Scalar> s =
        (basis.sine_table.transpose() * q.values) / Scalar(basis.grid.size);
    s[0] = Scalar(0);
    return SineField<Scalar>(std::move(s));
}

template <typename Scalar>
NodalField<Scalar> sine_to_nodal(const SineField<Scalar>& s,
                                 const Basis<Scalar>& basis) {
    detail::require_modal_match(s.modes(), basis, "sine_to_nodal");
    return NodalField<Scalar>(basis.sine_table * s.coeffs);
}

// Derivative of a cosine series is a sine series: d/dx phi_k = -k pi psi_k.
template <typename Scalar>
SineField<Scalar> derivative(const SpectralField<Scalar>& u) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    SineField<Scalar> s = SineField<Scalar>::zero(u.modes());
    for (Index k = 1; k < u.modes(); ++k)
        s.coeffs[k] = -Scalar(k) * pi * u.coeffs[k];
    return s;
}

template <typename Scalar>
Scalar l2_distance(const SpectralField<Scalar>& a, const SpectralField<Scalar>& b) {
    if (a.modes() != b.modes())
        throw std::invalid_argument("l2_distance: coefficient counts differ");
    return (a.coeffs - b.coeffs).norm();
}

}  // namespace fraclap
