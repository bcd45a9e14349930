#pragma once

#include <Eigen/Core>

#include "gppenalty/dataset.hpp"

namespace gppen {

enum class PenaltyFamily { none, lasso, scad };

// Sparsity penalty on the inverse-squared lengthscales. Because the search
// box keeps every theta_p strictly positive, |theta_p| = theta_p and both
// families are smooth over the feasible region.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::none;
  double lambda = 0.0;  // penalty weight, >= 0
  double scad_a = 3.7;  // SCAD shape, > 2
};

// p_lambda(theta) summed over coordinates: lambda * sum|theta_p| for LASSO,
// the piecewise quadratic-spline form for SCAD, 0 for none.
// Throws DomainError for lambda < 0 or scad_a <= 2.
double penalty_value(const PenaltySpec& spec, const Eigen::VectorXd& theta);

// Coordinate-wise derivative of penalty_value (valid for theta_p > 0).
Eigen::VectorXd penalty_grad(const PenaltySpec& spec,
                             const Eigen::VectorXd& theta);

// Penalized objective Q(theta) = profile_loglik(theta) - n * p_lambda(theta).
// With lambda = 0 (or family none) the subtracted term is exactly 0.0, so
// the value is bit-identical to the unpenalized profile log likelihood.
double penalized_loglik(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y, double g,
                        const PenaltySpec& spec);
double penalized_loglik(const Eigen::VectorXd& theta, const Dataset& data,
                        double g, const PenaltySpec& spec);

// Analytic gradient of the penalized objective.
Eigen::VectorXd grad_penalized_loglik(const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y, double g,
                                      const PenaltySpec& spec);

}  // namespace gppen
