#pragma once

// One backward-Euler step of u_t + (f(u) I(u)_x)_x = 0, posed as the
// stationary problem
//   u + tau * d/dx ( f(u) d/dx I(u) ) = g
// and discretized by Galerkin projection onto the first N cosine modes with
// the nonlinear flux evaluated pointwise on the dealiased midpoint grid.
// Coefficient form of the residual, using q = sine coefficients of f(u) I(u)_x:
//   r_0 = u_0 - g_0                       (no flux in the mass row)
//   r_k = (u_k - g_k) + tau * k pi * q_k  (k >= 1)
// The mass row carries no flux term, so the step conserves the mean up to the
// solver tolerance by construction.
//
// The Newton iteration uses a finite-difference Jacobian (dense; the systems
// here are desk scale), a halving backtracking line search on the residual
// norm, and a relaxed residual-damping sweep as a fallback when a Newton
// direction makes no progress.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclap/fields.hpp"
#include "fraclap/operators.hpp"
#include "fraclap/params.hpp"

namespace fraclap {

template <typename Scalar = double>
struct StationaryProblem {
    SpectralField<Scalar> g;          // previous state / right-hand side
    ModelParams<Scalar> params;
    EntropySpec<Scalar> spec;
};

template <typename Scalar = double>
struct StationarySolution {
    SpectralField<Scalar> u;
    Scalar residual_norm = Scalar(0);
    int newton_iters = 0;
    Scalar dissipation = Scalar(0);   // (1/M) sum f(u_j) (I(u)_x)_j^2
    bool converged = false;
    bool clamped = false;             // accepted state has negative nodes
                                      // (bertozzi_pugh mobility only)
    std::vector<Scalar> residual_history;
};

// Pointwise flux data at a given iterate. For the bertozzi_pugh mobility,
// negative nodal values are clamped to zero before evaluating f (the mobility
// is only defined on s >= 0).
template <typename Scalar>
struct FluxData {
    NodalField<Scalar> u_nodal;
    NodalField<Scalar> dxI_nodal;
    Eigen::VectorX<Scalar> flux;      // f(u_j) * (I(u)_x)_j
};

template <typename Scalar>
FluxData<Scalar> evaluate_flux(const SpectralField<Scalar>& u,
                               const EntropySpec<Scalar>& spec,
                               const Basis<Scalar>& basis) {
    FluxData<Scalar> d;
    d.u_nodal = to_nodal(u, basis);
    d.dxI_nodal = sine_to_nodal(apply_dxI(u), basis);
    const Index M = basis.grid.size;
    d.flux.resize(M);
    const bool clamp = spec.kind() == MobilityKind::bertozzi_pugh;
    for (Index j = 0; j < M; ++j) {
        Scalar s = d.u_nodal.values[j];
        if (clamp && s < Scalar(0)) s = Scalar(0);
        d.flux[j] = spec.f(s) * d.dxI_nodal.values[j];
    }
    return d;
}

template <typename Scalar>
SpectralField<Scalar> residual(const SpectralField<Scalar>& u,
                               const StationaryProblem<Scalar>& prob,
                               const Basis<Scalar>& basis) {
    if (u.modes() != prob.g.modes())
        throw std::invalid_argument("residual: u and g coefficient counts differ");
    detail::require_modal_match(u.modes(), basis, "residual");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    FluxData<Scalar> d = evaluate_flux(u, prob.spec, basis);
    SineField<Scalar> q = nodal_to_sine(NodalField<Scalar>(d.flux), basis);
    SpectralField<Scalar> r(Eigen::VectorX<Scalar>(u.coeffs - prob.g.coeffs));
    for (Index k = 1; k < r.modes(); ++k)
        r.coeffs[k] += prob.params.tau * Scalar(k) * pi * q.coeffs[k];
    return r;
}

template <typename Scalar>
Scalar dissipation_rate(const FluxData<Scalar>& d, const EntropySpec<Scalar>& spec) {
    const Index M = d.flux.size();
    Scalar sum = Scalar(0);
    const bool clamp = spec.kind() == MobilityKind::bertozzi_pugh;
    for (Index j = 0; j < M; ++j) {
        Scalar s = d.u_nodal.values[j];
        if (clamp && s < Scalar(0)) s = Scalar(0);
        const Scalar w = d.dxI_nodal.values[j];
        sum += spec.f(s) * w * w;
    }
    return sum / Scalar(M);
}

namespace detail {

// Dense finite-difference Jacobian, one residual evaluation per column with
// a shared increment h = 1e-7 (1 + |u|).
template <typename Scalar>
Eigen::MatrixX<Scalar> fd_jacobian(const SpectralField<Scalar>& u,
                                   const SpectralField<Scalar>& r0,
                                   const StationaryProblem<Scalar>& prob,
                                   const Basis<Scalar>& basis) {
    const Index N = u.modes();
    const Scalar h = Scalar(1e-7) * (Scalar(1) + u.l2_norm());
    Eigen::MatrixX<Scalar> J(N, N);
    SpectralField<Scalar> up = u;
    for (Index k = 0; k < N; ++k) {
        up.coeffs[k] += h;
        SpectralField<Scalar> rp = residual(up, prob, basis);
        J.col(k) = (rp.coeffs - r0.coeffs) / h;
        up.coeffs[k] = u.coeffs[k];
    }
    return J;
}

}  // namespace detail

template <typename Scalar>
StationarySolution<Scalar> solve_step(const StationaryProblem<Scalar>& prob,
                                      const Basis<Scalar>& basis,
                                      const SpectralField<Scalar>& u_init) {
    const Scalar tol =
        prob.params.newton_tol * (Scalar(1) + prob.g.l2_norm());
    const int max_iter = prob.params.newton_max_iter;

    StationarySolution<Scalar> sol;
    sol.u = u_init;
    SpectralField<Scalar> r = residual(sol.u, prob, basis);
    Scalar rnorm = r.l2_norm();
    sol.residual_history.push_back(rnorm);

    bool stalled = false;
    while (rnorm > tol && sol.newton_iters < max_iter && !stalled) {
        Eigen::MatrixX<Scalar> J = detail::fd_jacobian(sol.u, r, prob, basis);
        Eigen::VectorX<Scalar> du = J.partialPivLu().solve(-r.coeffs);

        stalled = true;
        Scalar alpha = Scalar(1);
        for (int halving = 0; halving < 30; ++halving) {
            SpectralField<Scalar> u_try(
                Eigen::VectorX<Scalar>(sol.u.coeffs + alpha * du));
            SpectralField<Scalar> r_try = residual(u_try, prob, basis);
            const Scalar rn_try = r_try.l2_norm();
            if (rn_try < rnorm) {
                sol.u = std::move(u_try);
                r = std::move(r_try);
                rnorm = rn_try;
                stalled = false;
                break;
            }
            alpha /= Scalar(2);
        }
        if (!stalled) {
            ++sol.newton_iters;
            sol.residual_history.push_back(rnorm);
        }
    }

    // Fallback: damped residual iteration u <- u - omega r(u). Slow but it
    // only needs residual evaluations, which makes it robust when the
    // finite-difference Jacobian is unusable.
    if (rnorm > tol) {
        for (int sweep = 0; sweep < max_iter && rnorm > tol; ++sweep) {
            Scalar omega = Scalar(1);
            bool improved = false;
            for (int halving = 0; halving < 40; ++halving) {
                SpectralField<Scalar> u_try(
                    Eigen::VectorX<Scalar>(sol.u.coeffs - omega * r.coeffs));
                SpectralField<Scalar> r_try = residual(u_try, prob, basis);
                const Scalar rn_try = r_try.l2_norm();
                if (rn_try < rnorm) {
                    sol.u = std::move(u_try);
                    r = std::move(r_try);
                    rnorm = rn_try;
                    improved = true;
                    break;
                }
                omega /= Scalar(2);
            }
            if (!improved) break;
            ++sol.newton_iters;
            sol.residual_history.push_back(rnorm);
        }
    }

    sol.residual_norm = rnorm;
    sol.converged = rnorm <= tol;
    FluxData<Scalar> d = evaluate_flux(sol.u, prob.spec, basis);
    sol.dissipation = dissipation_rate(d, prob.spec);
    if (prob.spec.kind() == MobilityKind::bertozzi_pugh) {
        // Flag only meaningful negativity of the accepted state; values at
        // rounding level below zero are treated as zero.
        const Scalar floor =
            Scalar(-1e-12) * (Scalar(1) + d.u_nodal.values.cwiseAbs().maxCoeff());
        sol.clamped = d.u_nodal.values.minCoeff() < floor;
    }
    return sol;
}

template <typename Scalar>
StationarySolution<Scalar> solve_step(const StationaryProblem<Scalar>& prob,
                                      const Basis<Scalar>& basis) {
    return solve_step(prob, basis, prob.g);
}

}  // namespace fraclap
