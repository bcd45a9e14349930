#pragma once

// Space-filling designs for training/test inputs on the unit hypercube.

#include <Eigen/Dense>

#include "gppenalty/rng.hpp"

namespace gppen {

// Latin hypercube sample of n points in [0,1]^d: each column independently
// places one point uniformly inside each of n equal strata, in an order
// given by a fresh random permutation.  Draws consume the generator
// column-by-column (permutation first, then the n jitters).
Eigen::MatrixXd lhs_design(int n, int d, Rng& rng);

}  // namespace gppen
