#include "gppenalty/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gppenalty/errors.hpp"
#include "gppenalty/gp.hpp"

namespace gppen {

namespace {

void validate(const PenaltySpec& spec) {
  if (spec.lambda < 0.0) {
    throw DomainError("penalty: lambda = " + std::to_string(spec.lambda) +
                      " is negative");
  }
  if (spec.family == PenaltyFamily::scad && !(spec.scad_a > 2.0)) {
    throw DomainError("penalty: SCAD shape a = " + std::to_string(spec.scad_a) +
                      " must exceed 2");
  }
}

}  // namespace

double penalty_value(const PenaltySpec& spec, const Eigen::VectorXd& theta) {
  validate(spec);
  if (spec.family == PenaltyFamily::none || spec.lambda == 0.0) {
    return 0.0;
  }
  const double lam = spec.lambda;
  if (spec.family == PenaltyFamily::lasso) {
    return lam * theta.cwiseAbs().sum();
  }
  // SCAD: linear up to lambda, quadratic spline up to a*lambda, constant
  // beyond (Fan-Li form).
  const double a = spec.scad_a;
  double total = 0.0;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    const double t = std::abs(theta[p]);
    if (t <= lam) {
      total += lam * t;
    } else if (t <= a * lam) {
      total += (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
    } else {
      total += lam * lam * (a + 1.0) / 2.0;
    }
  }
  return total;
}

Eigen::VectorXd penalty_grad(const PenaltySpec& spec,
                             const Eigen::VectorXd& theta) {
  validate(spec);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  if (spec.family == PenaltyFamily::none || spec.lambda == 0.0) {
    return grad;
  }
  const double lam = spec.lambda;
  if (spec.family == PenaltyFamily::lasso) {
    grad.setConstant(lam);
    return grad;
  }
  const double a = spec.scad_a;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    const double t = std::abs(theta[p]);
    grad[p] = (t <= lam) ? lam : std::max(a * lam - t, 0.0) / (a - 1.0);
  }
  return grad;
}

double penalized_loglik(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y, double g,
                        const PenaltySpec& spec) {
  const double ll = profile_loglik(theta, X, y, g);
  return ll - static_cast<double>(y.size()) * penalty_value(spec, theta);
}

double penalized_loglik(const Eigen::VectorXd& theta, const Dataset& data,
                        double g, const PenaltySpec& spec) {
  return penalized_loglik(theta, data.inputs, data.responses, g, spec);
}

Eigen::VectorXd grad_penalized_loglik(const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y, double g,
                                      const PenaltySpec& spec) {
  const Eigen::VectorXd grad_ll = grad_profile_loglik(theta, X, y, g);
  return grad_ll -
         static_cast<double>(y.size()) * penalty_grad(spec, theta);
}

}  // namespace gppen
