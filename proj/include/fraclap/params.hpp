#pragma once

// Run parameters shared by the stationary solver and the time stepper.

#include <stdexcept>
#include <string>

#include "fraclap/grid.hpp"
#include "fraclap/mobility.hpp"

namespace fraclap {

template <typename Scalar = double>
struct ModelParams {
    Scalar n = Scalar(3);                 // mobility exponent, n >= 1
    Scalar eps = Scalar(1e-3);            // power mobility lift
    Scalar delta = Scalar(0);             // bertozzi_pugh regularization
    Scalar tau = Scalar(1e-5);            // implicit step size
    Index modes = 64;                     // N, cosine modes
    Index nodes = 128;                    // M, collocation nodes (M >= 2N)
    Scalar T = Scalar(1e-2);              // final time
    Scalar newton_tol = Scalar(1e-10);    // relative residual tolerance
    int newton_max_iter = 30;
    MobilityKind mobility = MobilityKind::power_eps;
    bool track_entropy = true;

    void validate() const {
        if (n < Scalar(1))
            throw std::invalid_argument("ModelParams: n must be >= 1");
        if (eps < Scalar(0) || delta < Scalar(0))
            throw std::invalid_argument("ModelParams: eps and delta must be >= 0");
        if (eps > Scalar(0) && delta > Scalar(0))
            throw std::invalid_argument(
                "ModelParams: at most one of eps, delta may be positive");
        if (mobility == MobilityKind::bertozzi_pugh) {
            if (delta <= Scalar(0))
                throw std::invalid_argument(
                    "ModelParams: bertozzi_pugh mobility requires delta > 0");
            if (n >= Scalar(2))
                throw std::invalid_argument(
                    "ModelParams: bertozzi_pugh mobility requires 1 <= n < 2");
        }
        if (mobility == MobilityKind::power_eps && delta > Scalar(0))
            throw std::invalid_argument(
                "ModelParams: power_eps mobility does not use delta");
        if (tau <= Scalar(0))
            throw std::invalid_argument("ModelParams: tau must be > 0");
        if (T <= Scalar(0))
            throw std::invalid_argument("ModelParams: T must be > 0");
        if (modes < 2)
            throw std::invalid_argument("ModelParams: at least 2 modes required");
        if (nodes < 2 * modes)
            throw std::invalid_argument("ModelParams: nodes >= 2*modes required");
        if (newton_tol <= Scalar(0))
            throw std::invalid_argument("ModelParams: newton_tol must be > 0");
        if (newton_max_iter < 1)
            throw std::invalid_argument("ModelParams: newton_max_iter must be >= 1");
    }

    EntropySpec<Scalar> make_entropy_spec() const {
        switch (mobility) {
            case MobilityKind::power_eps: return EntropySpec<Scalar>::power(n, eps);
            case MobilityKind::bertozzi_pugh:
                return EntropySpec<Scalar>::bertozzi_pugh(n, delta);
            case MobilityKind::constant: return EntropySpec<Scalar>::constant();
        }
        throw std::invalid_argument("ModelParams: unknown mobility kind");
    }
};

}  // namespace fraclap
