#pragma once

// Time marching for u_t + (f(u) I(u)_x)_x = 0 by repeated implicit steps,
// with the per-step ledgers the scheme is supposed to respect:
//   mass         m(t) = c_0, conserved step by step
//   energy       |u|_{H^1/2}^2 + 2 sum tau_i D_i <= |u_0|_{H^1/2}^2
//   entropy      int G(u) + sum tau_i |u_i|_{H^3/2}^2 <= int G(u_0) + eta(N)
// where eta(N) is the Galerkin projection defect (G'(u) is not a polynomial
// of the resolved band), observed to shrink as N grows.
//
// A failed implicit step is retried on two half steps, recursively up to 5
// halvings; if the smallest substep still fails, the run stops and returns
// the partial trajectory with completed = false.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fraclap/stationary.hpp"

namespace fraclap {

template <typename Scalar = double>
struct StepReport {
    Scalar t = Scalar(0);
    Scalar mass = Scalar(0);
    Scalar energy_half = Scalar(0);       // |u|_{H^1/2}^2
    Scalar dissipation_cum = Scalar(0);   // sum 2 tau_i D_i
    Scalar entropy = Scalar(0);           // int G(u) dx, NaN when not tracked
    Scalar h32_cum = Scalar(0);           // sum tau_i |u_i|_{H^3/2}^2
    Scalar min_u = Scalar(0);
    Scalar max_u = Scalar(0);
    Scalar flux_l1 = Scalar(0);           // (1/M) sum |f(u_j) (I(u)_x)_j|
    int newton_iters = 0;
    int substeps = 1;                     // > 1 when the step was bisected
    bool clamped = false;
};

template <typename Scalar = double>
struct Trajectory {
    SpectralField<Scalar> initial;                 // state actually stepped from
    std::vector<StepReport<Scalar>> reports;       // one per accepted step
    std::vector<Scalar> snapshot_times;
    std::vector<SpectralField<Scalar>> snapshots;  // t = 0, strided, final
    bool completed = false;
    std::string failure_reason;

    const SpectralField<Scalar>& final_state() const { return snapshots.back(); }
};

namespace detail {

template <typename Scalar>
struct SubstepTotals {
    int newton_iters = 0;
    int substeps = 0;
    Scalar dissipation_sum = Scalar(0);   // sum tau_i D_i over substeps
    Scalar h32_sum = Scalar(0);           // sum tau_i |u_i|^2_{H^3/2}
    bool clamped = false;
};

// Advance u by dt, bisecting on solver failure. Returns false when a substep
// still fails at the maximum bisection depth.
template <typename Scalar>
bool advance(SpectralField<Scalar>& u, Scalar dt, int depth,
             const ModelParams<Scalar>& params, const EntropySpec<Scalar>& spec,
             const Basis<Scalar>& basis, SubstepTotals<Scalar>& totals) {
    StationaryProblem<Scalar> prob{u, params, spec};
    prob.params.tau = dt;
    StationarySolution<Scalar> sol = solve_step(prob, basis);
    if (sol.converged) {
        u = sol.u;
        totals.newton_iters += sol.newton_iters;
        totals.substeps += 1;
        totals.dissipation_sum += dt * sol.dissipation;
        totals.h32_sum += dt * seminorm_sq(u, Scalar(1.5));
        totals.clamped = totals.clamped || sol.clamped;
        return true;
    }
    if (depth >= 5) return false;
    SpectralField<Scalar> saved = u;
    if (advance(u, dt / Scalar(2), depth + 1, params, spec, basis, totals) &&
        advance(u, dt / Scalar(2), depth + 1, params, spec, basis, totals))
        return true;
    u = saved;
    return false;
}

template <typename Scalar>
Trajectory<Scalar> march(const ModelParams<Scalar>& params,
                         const SpectralField<Scalar>& u0,
                         const EntropySpec<Scalar>& spec, Index stride) {
    params.validate();
    if (u0.modes() != params.modes)
        throw std::invalid_argument("run: u0 does not have params.modes coefficients");
    const Basis<Scalar> basis = Basis<Scalar>::make(params.modes, params.nodes);
    const long long steps = std::llround(params.T / params.tau);
    if (steps < 1)
        throw std::invalid_argument("run: T/tau must round to at least one step");

    Trajectory<Scalar> traj;
    traj.initial = u0;
    traj.snapshot_times.push_back(Scalar(0));
    traj.snapshots.push_back(u0);

    if (params.track_entropy)
        entropy_integral(to_nodal(u0, basis), spec);  // validate u0 domain

    SpectralField<Scalar> u = u0;
    Scalar dissipation_cum = Scalar(0);
    Scalar h32_cum = Scalar(0);
    int consecutive_clamped = 0;

    for (long long m = 1; m <= steps; ++m) {
        SubstepTotals<Scalar> totals;
        if (!advance(u, params.tau, 0, params, spec, basis, totals)) {
            traj.failure_reason = "implicit step failed at t = " +
                                  std::to_string(static_cast<double>(m) *
                                                 static_cast<double>(params.tau)) +
                                  " after 5 bisections";
            return traj;
        }
        dissipation_cum += Scalar(2) * totals.dissipation_sum;
        h32_cum += totals.h32_sum;

        StepReport<Scalar> rep;
        rep.t = Scalar(m) * params.tau;
        rep.mass = u.mean();
        rep.energy_half = seminorm_sq(u, Scalar(0.5));
        rep.dissipation_cum = dissipation_cum;
        rep.h32_cum = h32_cum;
        rep.newton_iters = totals.newton_iters;
        rep.substeps = totals.substeps;
        rep.clamped = totals.clamped;

        FluxData<Scalar> d = evaluate_flux(u, spec, basis);
        rep.min_u = d.u_nodal.values.minCoeff();
        rep.max_u = d.u_nodal.values.maxCoeff();
        rep.flux_l1 = d.flux.cwiseAbs().sum() / Scalar(basis.grid.size);
        if (params.track_entropy)
            rep.entropy = entropy_integral(d.u_nodal, spec);
        else
            rep.entropy = std::numeric_limits<Scalar>::quiet_NaN();
        traj.reports.push_back(rep);

        consecutive_clamped = totals.clamped ? consecutive_clamped + 1 : 0;
        if (consecutive_clamped >= 10) {
            traj.failure_reason =
                "iterates clamped to zero on 10 consecutive steps";
            return traj;
        }

        const bool last = (m == steps);
        if (last || (stride > 0 && m % stride == 0)) {
            traj.snapshot_times.push_back(rep.t);
            traj.snapshots.push_back(u);
        }
    }
    traj.completed = true;
    return traj;
}

}  // namespace detail

template <typename Scalar>
Trajectory<Scalar> run_bertozzi_pugh(const ModelParams<Scalar>& params,
                                     const SpectralField<Scalar>& u0,
                                     Index stride = 0);

// Generic run with the mobility selected by params (power_eps or constant).
template <typename Scalar>
Trajectory<Scalar> run(const ModelParams<Scalar>& params,
                       const SpectralField<Scalar>& u0, Index stride = 0) {
    if (params.mobility == MobilityKind::bertozzi_pugh)
        return run_bertozzi_pugh(params, u0, stride);
    return detail::march(params, u0, params.make_entropy_spec(), stride);
}

// Degenerate-mobility run: requires 1 <= n < 2 and nonnegative initial data,
// and starts from the lifted state u0 + delta so the iterates begin strictly
// positive.
template <typename Scalar>
Trajectory<Scalar> run_bertozzi_pugh(const ModelParams<Scalar>& params,
                                     const SpectralField<Scalar>& u0,
                                     Index stride) {
    params.validate();
    if (params.mobility != MobilityKind::bertozzi_pugh)
        throw std::invalid_argument(
            "run_bertozzi_pugh: params.mobility must be bertozzi_pugh");
    if (!(params.n >= Scalar(1) && params.n < Scalar(2)))
        throw std::invalid_argument("run_bertozzi_pugh: requires 1 <= n < 2");
    const Basis<Scalar> basis = Basis<Scalar>::make(params.modes, params.nodes);
    NodalField<Scalar> u0n = to_nodal(u0, basis);
    if (u0n.values.minCoeff() < Scalar(0))
        throw std::invalid_argument(
            "run_bertozzi_pugh: initial data must be nonnegative nodally");
    SpectralField<Scalar> lifted = u0;
    lifted.coeffs[0] += params.delta;
    return detail::march(params, lifted, params.make_entropy_spec(), stride);
}

template <typename Scalar = double>
struct ContinuationResult {
    std::vector<Scalar> eps_schedule;
    std::vector<Trajectory<Scalar>> runs;
    std::vector<Scalar> final_distances;  // |u_{eps_i}(T) - u_{eps_{i+1}}(T)|_L2
};

// Rerun the same initial data over a decreasing eps schedule and report the
// pairwise distances of the final states (empirical Cauchy check for the
// eps -> 0 limit).
template <typename Scalar>
ContinuationResult<Scalar> continuation_eps(const ModelParams<Scalar>& params,
                                            const SpectralField<Scalar>& u0,
                                            const std::vector<Scalar>& eps_schedule,
                                            Index stride = 0) {
    if (eps_schedule.empty())
        throw std::invalid_argument("continuation_eps: empty schedule");
    for (size_t i = 0; i < eps_schedule.size(); ++i) {
        if (eps_schedule[i] <= Scalar(0))
            throw std::invalid_argument("continuation_eps: eps must be > 0");
        if (i > 0 && eps_schedule[i] >= eps_schedule[i - 1])
            throw std::invalid_argument(
                "continuation_eps: schedule must be strictly decreasing");
    }
    ContinuationResult<Scalar> result;
    result.eps_schedule = eps_schedule;
    for (Scalar e : eps_schedule) {
        ModelParams<Scalar> p = params;
        p.mobility = MobilityKind::power_eps;
        p.eps = e;
        p.delta = Scalar(0);
        result.runs.push_back(run(p, u0, stride));
    }
    for (size_t i = 0; i + 1 < result.runs.size(); ++i)
        result.final_distances.push_back(l2_distance(
            result.runs[i].final_state(), result.runs[i + 1].final_state()));
    return result;
}

// Pressure diagnostic p = -(E'/4) I(u) for a material with elastic modulus
// derivative E' > 0.
template <typename Scalar>
SpectralField<Scalar> pressure(const SpectralField<Scalar>& u, Scalar E_prime) {
    if (E_prime <= Scalar(0))
        throw std::invalid_argument("pressure: E_prime must be > 0");
    SpectralField<Scalar> p = apply_I(u);
    p.coeffs *= -(E_prime / Scalar(4));
    return p;
}

}  // namespace fraclap
