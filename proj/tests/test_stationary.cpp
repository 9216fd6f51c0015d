#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/stationary.hpp"

using namespace fraclap;
namespace {
constexpr double pi = std::numbers::pi;

ModelParams<double> small_params(Index N, Index M, double tau) {
    ModelParams<double> p;
    p.modes = N;
    p.nodes = M;
    p.tau = tau;
    return p;
}
}  // namespace

TEST_CASE("residual reduces to (1 + tau lambda^{3/2}) u - g for unit mobility") {
    const Index N = 16, M = 32;
    const double tau = 0.37;
    Basis<double> basis = Basis<double>::make(N, M);
    ModelParams<double> p = small_params(N, M, tau);
    p.mobility = MobilityKind::constant;
    p.eps = 0.0;

    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField<double> u = SpectralField<double>::zero(N);
    SpectralField<double> g = SpectralField<double>::zero(N);
    for (Index k = 0; k < N; ++k) {
        u.coeffs[k] = gauss(rng);
        g.coeffs[k] = gauss(rng);
    }
    StationaryProblem<double> prob{g, p, EntropySpec<double>::constant()};
    SpectralField<double> r = residual(u, prob, basis);

    CHECK(std::abs(r.coeffs[0] - (u.coeffs[0] - g.coeffs[0])) <= 1e-15);
    for (Index k = 1; k < N; ++k) {
        const double expected =
            (1.0 + tau * std::pow(k * pi, 3.0)) * u.coeffs[k] - g.coeffs[k];
        CHECK(std::abs(r.coeffs[k] - expected) <= 1e-12 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("unit-mobility step: single mode has the explicit solution") {
    const Index N = 8, M = 16;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[1] = 1.0;

    ModelParams<double> p = small_params(N, M, 1.0);
    p.mobility = MobilityKind::constant;
    p.eps = 0.0;
    const double exact = 1.0 / (1.0 + pi * pi * pi);

    SUBCASE("loose tolerance: one Newton iteration suffices") {
        p.newton_tol = 1e-6;
        StationaryProblem<double> prob{g, p, EntropySpec<double>::constant()};
        StationarySolution<double> sol = solve_step(prob, basis);
        CHECK(sol.converged);
        CHECK(sol.newton_iters == 1);
        CHECK(std::abs(sol.u.coeffs[1] - exact) <= 1e-7);
        // the finite-difference Jacobian carries O(1e-9) cross-mode noise, so
        // the untouched modes are small but not exactly zero after one sweep
        for (Index k = 2; k < N; ++k)
            CHECK(std::abs(sol.u.coeffs[k]) <= 1e-7);
        CHECK(std::abs(sol.u.coeffs[0]) <= 1e-14);
    }

    SUBCASE("tight tolerance: a couple of corrections land on the solution") {
        p.newton_tol = 1e-12;
        StationaryProblem<double> prob{g, p, EntropySpec<double>::constant()};
        StationarySolution<double> sol = solve_step(prob, basis);
        CHECK(sol.converged);
        CHECK(sol.newton_iters <= 3);
        CHECK(std::abs(sol.u.coeffs[1] - exact) <= 1e-12);
    }
}

TEST_CASE("a constant state is a fixed point, solved with zero iterations") {
    const Index N = 8, M = 16;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[0] = 1.2;
    ModelParams<double> p = small_params(N, M, 1e-3);
    StationaryProblem<double> prob{g, p, p.make_entropy_spec()};
    StationarySolution<double> sol = solve_step(prob, basis);
    CHECK(sol.converged);
    CHECK(sol.newton_iters == 0);
    CHECK((sol.u.coeffs - g.coeffs).norm() == 0.0);
    CHECK(sol.dissipation == 0.0);
}

TEST_CASE("nonlinear step: convergence, conserved mean, energy inequality") {
    const Index N = 64, M = 128;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[0] = 1.5;
    g.coeffs[1] = 1.0 / std::sqrt(2.0);  // g = 1.5 + cos(pi x) > 0

    ModelParams<double> p = small_params(N, M, 1e-4);
    p.n = 3.0;
    p.eps = 1e-3;
    p.newton_tol = 1e-10;
    StationaryProblem<double> prob{g, p, p.make_entropy_spec()};
    StationarySolution<double> sol = solve_step(prob, basis);

    REQUIRE(sol.converged);
    CHECK(std::abs(sol.u.coeffs[0] - g.coeffs[0]) <= 1e-13);
    CHECK(sol.dissipation >= 0.0);
    CHECK(sol.residual_norm <= p.newton_tol * (1.0 + g.l2_norm()));

    // Multiplying the residual rows by 2 k pi u_k telescopes into
    //   E(u) + E(u-g) + 2 tau D = E(g) + 2 sum k pi u_k r_k,
    // so the backward-Euler step dissipates the squared H^{1/2} semi-norm up
    // to a slack controlled by the final residual (Cauchy-Schwarz).
    const double Eu = seminorm_sq(sol.u, 0.5);
    const double Eg = seminorm_sq(g, 0.5);
    SpectralField<double> diff(Eigen::VectorXd(sol.u.coeffs - g.coeffs));
    const double Ed = seminorm_sq(diff, 0.5);
    const double slack =
        2.0 * sol.residual_norm * std::sqrt(seminorm_sq(sol.u, 1.0)) +
        1e-12 * (1.0 + Eg);
    CHECK(Eu + Ed + 2.0 * p.tau * sol.dissipation <= Eg + slack);

    // the step moved the state but only slightly at this tau
    CHECK((sol.u.coeffs - g.coeffs).norm() > 0.0);
    CHECK((sol.u.coeffs - g.coeffs).norm() < 0.1);
}

TEST_CASE("even-mode initial data stays even through the nonlinear solve") {
    const Index N = 32, M = 64;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[0] = 1.2;
    g.coeffs[2] = 0.3;
    g.coeffs[4] = 0.1;

    ModelParams<double> p = small_params(N, M, 1e-4);
    p.n = 3.0;
    p.eps = 1e-3;
    StationaryProblem<double> prob{g, p, p.make_entropy_spec()};
    StationarySolution<double> sol = solve_step(prob, basis);
    REQUIRE(sol.converged);
    for (Index k = 1; k < N; k += 2)
        CHECK(std::abs(sol.u.coeffs[k]) <= 1e-10);
}

TEST_CASE("rational mobility flags states with meaningfully negative nodes") {
    const Index N = 16, M = 32;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[0] = 0.1;
    g.coeffs[1] = 1.0 / std::sqrt(2.0);  // dips to about -0.9 near x = 1

    ModelParams<double> p = small_params(N, M, 1e-6);
    p.n = 1.5;
    p.eps = 0.0;
    p.delta = 0.1;
    p.mobility = MobilityKind::bertozzi_pugh;
    StationaryProblem<double> prob{g, p, p.make_entropy_spec()};
    StationarySolution<double> sol = solve_step(prob, basis);
    CHECK(sol.converged);
    CHECK(sol.clamped);

    // the same solve on positive data is not flagged
    SpectralField<double> gp = SpectralField<double>::zero(N);
    gp.coeffs[0] = 1.5;
    gp.coeffs[1] = 0.1;
    StationaryProblem<double> prob2{gp, p, p.make_entropy_spec()};
    StationarySolution<double> sol2 = solve_step(prob2, basis);
    CHECK(sol2.converged);
    CHECK(!sol2.clamped);
}

TEST_CASE("an unreachable tolerance reports failure with a residual trace") {
    const Index N = 16, M = 32;
    Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> g = SpectralField<double>::zero(N);
    g.coeffs[0] = 1.5;
    g.coeffs[1] = 1.0 / std::sqrt(2.0);

    ModelParams<double> p = small_params(N, M, 1e6);  // absurd step size
    p.n = 3.0;
    p.eps = 1e-3;
    p.newton_tol = 1e-14;
    p.newton_max_iter = 1;
    StationaryProblem<double> prob{g, p, p.make_entropy_spec()};
    StationarySolution<double> sol = solve_step(prob, basis);
    CHECK(!sol.converged);
    CHECK(sol.residual_norm > 0.0);
    CHECK(sol.residual_history.size() >= 1);
    CHECK(sol.residual_history.front() >= sol.residual_history.back());
}

TEST_CASE("mismatched sizes are rejected") {
    Basis<double> basis = Basis<double>::make(8, 16);
    ModelParams<double> p = small_params(8, 16, 1e-3);
    StationaryProblem<double> prob{SpectralField<double>::zero(8), p,
                                   p.make_entropy_spec()};
    SpectralField<double> wrong = SpectralField<double>::zero(4);
    CHECK_THROWS_AS(residual(wrong, prob, basis), std::invalid_argument);
}
