#pragma once

// Midpoint collocation grid on (0,1): x_j = (2j+1)/(2M), uniform weight 1/M.
// The midpoint placement keeps every node strictly inside the interval, so
// singular kernels and positivity checks never see the endpoints.

#include <Eigen/Core>
#include <stdexcept>

namespace fraclap {

using Eigen::Index;

template <typename Scalar = double>
struct Grid {
    Index size = 0;                    // M, number of nodes
    Eigen::VectorX<Scalar> nodes;      // x_j, strictly increasing

    static Grid midpoint(Index M) {
        if (M < 1)
            throw std::invalid_argument("Grid::midpoint: M must be >= 1");
        Grid g;
        g.size = M;
        g.nodes.resize(M);
        for (Index j = 0; j < M; ++j)
            g.nodes[j] = Scalar(2 * j + 1) / Scalar(2 * M);
        return g;
    }

    Scalar weight() const { return Scalar(1) / Scalar(size); }
};

// Quadrature of nodal samples: (1/M) sum_j v_j, with the division applied to
// the sum (not per node) so that integrating the constant 1 is exact for any M.
template <typename Scalar>
Scalar quadrature(const Eigen::VectorX<Scalar>& values) {
    return values.sum() / Scalar(values.size());
}

}  // namespace fraclap
