#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "gppenalty/dataset.hpp"
#include "gppenalty/penalty.hpp"

namespace gppen {

// Box constraints and multistart policy for hyperparameter search.
struct OptimConfig {
  double theta_lo = 1e-3;    // lower box bound, > 0
  double theta_hi = 1e3;     // upper box bound
  int n_starts = 10;         // multistart count
  int max_iters = 500;       // L-BFGS iteration cap per start
  double grad_tol = 1e-6;    // sup-norm tolerance on the projected gradient
  std::uint64_t seed = 0;    // drives start placement
};

// Outcome of a multistart maximization.
struct FitResult {
  Eigen::VectorXd theta_hat;  // feasible maximizer found
  double objective = 0.0;     // penalized log likelihood at theta_hat
  int start_index = -1;       // which start produced the winner
  bool converged = false;     // winner met the projected-gradient tolerance
  int n_evals = 0;            // objective evaluations summed over all starts
};

// Start points for the multistart search. Each coordinate is distributed
// uniformly in log-theta over [log lo, log hi]; placement is Latin-hypercube
// stratified (one start per stratum per dimension, strata linked by seeded
// permutations) so even a handful of starts covers every order of magnitude
// of the box. Deterministic given seed.
//
// Throws DomainError when the box is empty (lo <= 0 or lo >= hi) or
// n_starts < 1.
Eigen::MatrixXd multistart_points(int d, double lo, double hi, int n_starts,
                                  std::uint64_t seed);

// Maximize the penalized profile log likelihood Q(theta) over the box
// [theta_lo, theta_hi]^d with n_starts runs of a projected L-BFGS ascent.
// Starts whose objective cannot be evaluated are discarded; the best
// objective over the surviving starts wins, ties resolved toward the lowest
// start index. Deterministic given config.seed.
//
// Throws OptimizationFailedError (with one diagnostic line per start) when
// every start fails.
FitResult maximize_penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double g, const PenaltySpec& spec,
                             const OptimConfig& config);
FitResult maximize_penalized(const Dataset& data, double g,
                             const PenaltySpec& spec,
                             const OptimConfig& config);

}  // namespace gppen
