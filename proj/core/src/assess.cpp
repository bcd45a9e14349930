#include "gppenalty/assess.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gppenalty/errors.hpp"

namespace gppen {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace

double rmse(const Eigen::VectorXd& y_test, const Eigen::VectorXd& mean_pred) {
  if (y_test.size() != mean_pred.size()) {
    throw ShapeError("rmse: " + std::to_string(y_test.size()) +
                     " observations vs " + std::to_string(mean_pred.size()) +
                     " predictions");
  }
  if (y_test.size() == 0) {
    throw EmptyDataError("rmse: no test points");
  }
  return std::sqrt((y_test - mean_pred).squaredNorm() /
                   static_cast<double>(y_test.size()));
}

double crps(const Eigen::VectorXd& y_test, const Eigen::VectorXd& mean_pred,
            const Eigen::VectorXd& sd_pred) {
  const Eigen::Index n = y_test.size();
  if (mean_pred.size() != n || sd_pred.size() != n) {
    throw ShapeError("crps: observation/mean/sd lengths disagree");
  }
  if (n == 0) {
    throw EmptyDataError("crps: no test points");
  }
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = sd_pred[i];
    if (tau < 0.0) {
      throw DomainError("crps: sd_pred[" + std::to_string(i) + "] = " +
                        std::to_string(tau) + " is negative");
    }
    const double r = y_test[i] - mean_pred[i];
    if (tau == 0.0) {
      total += std::abs(r);  // point-mass limit of the Gaussian CRPS
      continue;
    }
    const double z = r / tau;
    total += -tau * (inv_sqrt_pi - 2.0 * normal_pdf(z) -
                     z * (2.0 * normal_cdf(z) - 1.0));
  }
  return total / static_cast<double>(n);
}

Assessment assess(const Eigen::VectorXd& y_test,
                  const Eigen::VectorXd& mean_pred,
                  const Eigen::VectorXd& sd_pred) {
  Assessment a;
  a.rmse = rmse(y_test, mean_pred);
  a.crps = crps(y_test, mean_pred, sd_pred);
  a.n_test = y_test.size();
  return a;
}

}  // namespace gppen
