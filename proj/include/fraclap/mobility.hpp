#pragma once

// Mobility families and their entropy functions.
//
// Two regularizations of the degenerate mobility s^n are provided:
//   power_eps:      f_eps(s)   = (s_+)^n + eps            (eps > 0 lifts the zero)
//   bertozzi_pugh:  f_delta(s) = s^{3+n} / (delta s^n + s^3)
// plus a constant mobility f = 1 used as a linear debug mode. The entropy G
// associated with a mobility satisfies G'' = 1/f and is normalized by
// G(1) = G'(1) = 0, which makes it nonnegative and convex. For the pure power
// mobility (no regularization) G has closed forms in four branches of n; the
// regularized entropies are computed by adaptive quadrature of the reduced
// single integral G(s) = integral_1^s (s-t) G''(t) dt.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "fraclap/fields.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

enum class MobilityKind { power_eps, bertozzi_pugh, constant };

template <typename Scalar>
Scalar f_eps(Scalar s, Scalar n, Scalar eps) {
    return (s > Scalar(0) ? std::pow(s, n) : Scalar(0)) + eps;
}

// d/ds f_eps = n (s_+)^{n-1}; at s = 0 with n = 1 the one-sided limit 1 is
// used so the derivative stays bounded (std::pow(0,0) == 1 supplies it).
template <typename Scalar>
Scalar f_eps_prime(Scalar s, Scalar n, Scalar /*eps*/) {
    if (s < Scalar(0)) return Scalar(0);
    return n * std::pow(s, n - Scalar(1));
}

// f_delta(s) = s^{3+n}/(delta s^n + s^3) = s^3/(delta + s^{3-n}) after
// cancelling s^n; the reduced form is well behaved as s -> 0+ where
// f_delta ~ s^3/delta. Defined for s >= 0 only.
template <typename Scalar>
Scalar f_delta(Scalar s, Scalar n, Scalar delta) {
    if (s < Scalar(0))
        throw std::domain_error("f_delta: s must be >= 0");
    if (s == Scalar(0)) return Scalar(0);
    return s * s * s / (delta + std::pow(s, Scalar(3) - n));
}

// d/ds f_delta = (3 delta s^2 + n s^{5-n}) / (delta + s^{3-n})^2, again with
// s^n cancelled from numerator and denominator.
template <typename Scalar>
Scalar f_delta_prime(Scalar s, Scalar n, Scalar delta) {
    if (s < Scalar(0))
        throw std::domain_error("f_delta_prime: s must be >= 0");
    if (s == Scalar(0)) return Scalar(0);
    const Scalar den = delta + std::pow(s, Scalar(3) - n);
    return (Scalar(3) * delta * s * s + n * std::pow(s, Scalar(5) - n)) /
           (den * den);
}

// Entropy of the pure power mobility f(s) = s^n, normalized G(1) = G'(1) = 0.
// The antiderivatives change form at n = 1 and n = 2; both transitions are
// removable, and the n = 2 branch is substituted for |n-2| < 1e-9 (same for
// n = 1) to avoid catastrophic cancellation next to the removable point.
template <typename Scalar>
Scalar G_closed(Scalar s, Scalar n) {
    if (n < Scalar(1))
        throw std::invalid_argument("G_closed: n must be >= 1");
    const Scalar branch_tol = Scalar(1e-9);
    const bool near1 = std::abs(n - Scalar(1)) < branch_tol;
    const bool near2 = std::abs(n - Scalar(2)) < branch_tol;
    if (near2 || n > Scalar(2)) {
        if (s <= Scalar(0))
            throw std::domain_error("G_closed: s must be > 0 for n >= 2");
    } else if (s < Scalar(0)) {
        throw std::domain_error("G_closed: s must be >= 0 for n in [1,2)");
    }
    if (near1) {
        if (s == Scalar(0)) return Scalar(1);               // lim s log s = 0
        return s * std::log(s) - s + Scalar(1);
    }
    if (near2) {
        return -std::log(s) + s - Scalar(1);
    }
    if (n < Scalar(2)) {
        return -std::pow(s, Scalar(2) - n) / ((Scalar(2) - n) * (n - Scalar(1))) +
               s / (n - Scalar(1)) + Scalar(1) / (Scalar(2) - n);
    }
    return Scalar(1) / ((n - Scalar(2)) * (n - Scalar(1))) *
               std::pow(s, -(n - Scalar(2))) +
           s / (n - Scalar(1)) - Scalar(1) / (n - Scalar(2));
}

namespace detail {

// Adaptive Simpson quadrature with absolute tolerance. Plain textbook
// recursion; the integrands here are smooth on the integration interval.
template <typename Scalar, typename F>
Scalar simpson_rec(const F& f, Scalar a, Scalar b, Scalar fa, Scalar fm,
                   Scalar fb, Scalar whole, Scalar tol, int depth) {
    const Scalar m = (a + b) / Scalar(2);
    const Scalar lm = (a + m) / Scalar(2), rm = (m + b) / Scalar(2);
    const Scalar flm = f(lm), frm = f(rm);
    const Scalar left = (m - a) / Scalar(6) * (fa + Scalar(4) * flm + fm);
    const Scalar right = (b - m) / Scalar(6) * (fm + Scalar(4) * frm + fb);
    const Scalar err = left + right - whole;
    if (std::abs(err) <= Scalar(15) * tol)
        return left + right + err / Scalar(15);
    if (depth <= 0)
        throw std::runtime_error(
            "adaptive_simpson: tolerance not reached on [" +
            std::to_string(static_cast<double>(a)) + ", " +
            std::to_string(static_cast<double>(b)) + "]");
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / Scalar(2), depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / Scalar(2), depth - 1);
}

template <typename Scalar, typename F>
Scalar adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar tol_abs,
                        int max_depth = 48) {
    if (a == b) return Scalar(0);
    const Scalar fa = f(a), fb = f(b), fm = f((a + b) / Scalar(2));
    const Scalar whole = (b - a) / Scalar(6) * (fa + Scalar(4) * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol_abs, max_depth);
}

}  // namespace detail

// Mobility + entropy bundle for one parameter choice. G'' = 1/f throughout;
// G and G' fall back to quadrature when no closed form applies.
template <typename Scalar = double>
class EntropySpec {
  public:
    static EntropySpec power(Scalar n, Scalar eps) {
        check_n(n);
        if (eps < Scalar(0))
            throw std::invalid_argument("EntropySpec: eps must be >= 0");
        return EntropySpec(MobilityKind::power_eps, n, eps, Scalar(0));
    }
    static EntropySpec bertozzi_pugh(Scalar n, Scalar delta) {
        check_n(n);
        if (delta <= Scalar(0))
            throw std::invalid_argument("EntropySpec: delta must be > 0");
        return EntropySpec(MobilityKind::bertozzi_pugh, n, Scalar(0), delta);
    }
    static EntropySpec constant() {
        return EntropySpec(MobilityKind::constant, Scalar(1), Scalar(0), Scalar(0));
    }

    MobilityKind kind() const { return kind_; }
    Scalar n() const { return n_; }
    Scalar eps() const { return eps_; }
    Scalar delta() const { return delta_; }

    Scalar f(Scalar s) const {
        switch (kind_) {
            case MobilityKind::power_eps: return f_eps(s, n_, eps_);
            case MobilityKind::bertozzi_pugh: return f_delta(s, n_, delta_);
            case MobilityKind::constant: return Scalar(1);
        }
        return Scalar(0);
    }

    Scalar f_prime(Scalar s) const {
        switch (kind_) {
            case MobilityKind::power_eps: return f_eps_prime(s, n_, eps_);
            case MobilityKind::bertozzi_pugh: return f_delta_prime(s, n_, delta_);
            case MobilityKind::constant: return Scalar(0);
        }
        return Scalar(0);
    }

    // G'' = 1/f. For bertozzi_pugh the algebraic split 1/f_delta =
    // delta/s^3 + 1/s^n is used directly.
    Scalar G_second(Scalar s) const {
        switch (kind_) {
            case MobilityKind::power_eps:
                return Scalar(1) / f_eps(s, n_, eps_);
            case MobilityKind::bertozzi_pugh:
                if (s <= Scalar(0))
                    throw std::domain_error("G_second: s must be > 0 for f_delta");
                return delta_ / (s * s * s) + std::pow(s, -n_);
            case MobilityKind::constant:
                return Scalar(1);
        }
        return Scalar(0);
    }

    Scalar G(Scalar s) const {
        switch (kind_) {
            case MobilityKind::constant:
                return (s - Scalar(1)) * (s - Scalar(1)) / Scalar(2);
            case MobilityKind::power_eps:
                if (eps_ == Scalar(0)) return G_closed(s, n_);
                return quad_G(s);
            case MobilityKind::bertozzi_pugh:
                if (s <= Scalar(0))
                    throw std::domain_error("G: s must be > 0 for f_delta");
                return quad_G(s);
        }
        return Scalar(0);
    }

    Scalar G_prime(Scalar s) const {
        switch (kind_) {
            case MobilityKind::constant:
                return s - Scalar(1);
            case MobilityKind::bertozzi_pugh:
                if (s <= Scalar(0))
                    throw std::domain_error("G_prime: s must be > 0 for f_delta");
                break;
            case MobilityKind::power_eps:
                if (eps_ == Scalar(0) && s <= Scalar(0))
                    throw std::domain_error("G_prime: s out of the entropy domain");
                break;
        }
        return detail::adaptive_simpson<Scalar>(
            [this](Scalar t) { return G_second(t); }, Scalar(1), s, quad_tol);
    }

    static constexpr Scalar quad_tol = Scalar(1e-10);

  private:
    EntropySpec(MobilityKind kind, Scalar n, Scalar eps, Scalar delta)
        : kind_(kind), n_(n), eps_(eps), delta_(delta) {}
    static void check_n(Scalar n) {
        if (n < Scalar(1))
            throw std::invalid_argument("EntropySpec: n must be >= 1");
    }
    // Reduced single integral for the double antiderivative:
    // G(s) = integral_1^s (s - t) G''(t) dt.
    Scalar quad_G(Scalar s) const {
        return detail::adaptive_simpson<Scalar>(
            [this, s](Scalar t) { return (s - t) * G_second(t); }, Scalar(1), s,
            quad_tol);
    }

    MobilityKind kind_;
    Scalar n_, eps_, delta_;
};

// G_regularized as a free function, mirroring the closed-form entry point.
template <typename Scalar>
Scalar G_regularized(Scalar s, const EntropySpec<Scalar>& spec) {
    return spec.G(s);
}

// Nodal entropy integral (1/M) sum_j G(u_j). A node outside the domain of G
// is reported with its index; finiteness of this integral is the positivity
// certificate the scheme tracks.
template <typename Scalar>
Scalar entropy_integral(const NodalField<Scalar>& u, const EntropySpec<Scalar>& spec) {
    Scalar sum = Scalar(0);
    for (Index j = 0; j < u.size(); ++j) {
        try {
            sum += spec.G(u.values[j]);
        } catch (const std::domain_error&) {
            throw std::domain_error("entropy_integral: node " + std::to_string(j) +
                                    " (u = " +
                                    std::to_string(static_cast<double>(u.values[j])) +
                                    ") is outside the entropy domain");
        }
    }
    return sum / Scalar(u.size());
}

}  // namespace fraclap
