#pragma once

#include <Eigen/Core>

namespace gppen {

// Test-set evaluation summary for a fitted surrogate.
struct Assessment {
  double rmse = 0.0;
  double crps = 0.0;
  Eigen::Index n_test = 0;
};

// Root mean squared prediction error.
// Throws ShapeError on length mismatch, EmptyDataError when empty.
double rmse(const Eigen::VectorXd& y_test, const Eigen::VectorXd& mean_pred);

// Gaussian continuous ranked probability score, negated so that lower is
// better and the value is a nonnegative expected distance:
//   mean over i of -tau_i * (1/sqrt(pi) - 2 phi(z_i) - z_i (2 Phi(z_i) - 1)),
// z_i = (y_i - mu_i)/tau_i. A zero predictive spread degenerates to the
// point-mass limit |y_i - mu_i| instead of erroring, because clamped
// conditional variances can be exactly zero.
// Throws DomainError for negative sd, ShapeError on length mismatch.
double crps(const Eigen::VectorXd& y_test, const Eigen::VectorXd& mean_pred,
            const Eigen::VectorXd& sd_pred);

// Bundle both metrics.
Assessment assess(const Eigen::VectorXd& y_test,
                  const Eigen::VectorXd& mean_pred,
                  const Eigen::VectorXd& sd_pred);

}  // namespace gppen
