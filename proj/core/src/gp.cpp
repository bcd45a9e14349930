#include "gppenalty/gp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gppenalty/errors.hpp"

namespace gppen {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Factor R_n = L L' or throw NumericError with the offending theta/pivot.
Eigen::MatrixXd factor_or_throw(const Eigen::VectorXd& theta,
                                const Eigen::MatrixXd& X, double g,
                                const char* who) {
  Eigen::MatrixXd R = kernel_matrix(X, X, theta, g, /*add_nugget=*/true);
  const int pivot = cholesky_in_place(R);
  if (pivot >= 0) {
    throw NumericError(std::string(who) +
                           ": correlation matrix not positive definite at "
                           "pivot " + std::to_string(pivot),
                       to_std(theta), pivot);
  }
  return R;
}

}  // namespace

int cholesky_in_place(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = A(j, j);
    for (Eigen::Index k = 0; k < j; ++k) s -= A(j, k) * A(j, k);
    if (!(s > 0.0) || !std::isfinite(s)) {
      return static_cast<int>(j);
    }
    const double ljj = std::sqrt(s);
    A(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double t = A(i, j);
      for (Eigen::Index k = 0; k < j; ++k) t -= A(i, k) * A(j, k);
      A(i, j) = t / ljj;
    }
  }
  // Zero the upper triangle so the matrix is exactly the lower factor.
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) A(i, j) = 0.0;
  }
  return -1;
}

double profile_loglik(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double g) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw EmptyDataError("profile_loglik: empty dataset");
  if (y.size() != n) {
    throw ShapeError("profile_loglik: " + std::to_string(n) + " inputs vs " +
                     std::to_string(y.size()) + " responses");
  }
  const Eigen::MatrixXd L = factor_or_throw(theta, X, g, "profile_loglik");
  const Eigen::VectorXd a = L.triangularView<Eigen::Lower>().solve(y);
  const double quad = a.squaredNorm();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  return -(static_cast<double>(n) / 2.0) * std::log(quad) - 0.5 * logdet;
}

double profile_loglik(const Eigen::VectorXd& theta, const Dataset& data,
                      double g) {
  return profile_loglik(theta, data.inputs, data.responses, g);
}

double profile_loglik_mp(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& y, double eig_tol) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw EmptyDataError("profile_loglik_mp: empty dataset");
  if (y.size() != n) {
    throw ShapeError("profile_loglik_mp: input/response length mismatch");
  }
  const Eigen::MatrixXd R = kernel_matrix(X, X, theta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.info() != Eigen::Success) {
    throw NumericError("profile_loglik_mp: eigendecomposition failed",
                       to_std(theta), -1);
  }
  const Eigen::VectorXd w = es.eigenvalues();
  const Eigen::VectorXd z = es.eigenvectors().transpose() * y;

  // Pseudoinverse quadratic term: eigenvalues at or below the threshold are
  // treated as zero and drop out of the inverse.
  double quad = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w[i] > eig_tol) quad += z[i] * z[i] / w[i];
  }
  if (!(quad > 0.0)) return -std::numeric_limits<double>::infinity();

  // The determinant term deliberately keeps all computed eigenvalues; their
  // magnitudes are floored at the eigensolver's absolute error scale so the
  // log never sees a zero or negative value.
  const double floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
      w.cwiseAbs().maxCoeff();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    logdet += std::log(std::max(std::abs(w[i]), floor));
  }
  return -(static_cast<double>(n) / 2.0) * std::log(quad) - 0.5 * logdet;
}

double profile_loglik_mp(const Eigen::VectorXd& theta, const Dataset& data,
                         double eig_tol) {
  return profile_loglik_mp(theta, data.inputs, data.responses, eig_tol);
}

double sigma2_hat(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                  const Eigen::VectorXd& y, double g) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw EmptyDataError("sigma2_hat: empty dataset");
  if (y.size() != n) {
    throw ShapeError("sigma2_hat: input/response length mismatch");
  }
  const Eigen::MatrixXd L = factor_or_throw(theta, X, g, "sigma2_hat");
  const Eigen::VectorXd a = L.triangularView<Eigen::Lower>().solve(y);
  return a.squaredNorm() / static_cast<double>(n);
}

double sigma2_hat(const Eigen::VectorXd& theta, const Dataset& data, double g) {
  return sigma2_hat(theta, data.inputs, data.responses, g);
}

Eigen::VectorXd grad_profile_loglik(const Eigen::VectorXd& theta,
                                    const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y, double g) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n == 0) throw EmptyDataError("grad_profile_loglik: empty dataset");
  if (y.size() != n) {
    throw ShapeError("grad_profile_loglik: input/response length mismatch");
  }
  const Eigen::MatrixXd L =
      factor_or_throw(theta, X, g, "grad_profile_loglik");
  // R^{-1} from the factor; n is small enough that the explicit inverse is
  // the clearest way to form the trace term.
  const Eigen::MatrixXd Rinv = L.triangularView<Eigen::Lower>()
                                   .transpose()
                                   .solve(L.triangularView<Eigen::Lower>()
                                              .solve(Eigen::MatrixXd::Identity(n, n)));
  const Eigen::VectorXd alpha = Rinv * y;
  const double quad = y.dot(alpha);
  const Eigen::MatrixXd K0 = kernel_matrix(X, X, theta);

  Eigen::VectorXd grad(d);
  for (Eigen::Index p = 0; p < d; ++p) {
    // M_p(i,j) = -(x_ip - x_jp)^2 * K0(i,j), the derivative of R wrt theta_p.
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double diff = X(i, p) - X(j, p);
        M(i, j) = -diff * diff * K0(i, j);
      }
    }
    const double quad_term = alpha.dot(M * alpha) / quad;
    const double trace_term = (Rinv.array() * M.array()).sum();
    grad[p] = (static_cast<double>(n) / 2.0) * quad_term - 0.5 * trace_term;
  }
  return grad;
}

GPFit gp_fit(const Dataset& data, const KernelConfig& config) {
  if (config.theta.size() != data.d()) {
    throw ShapeError("gp_fit: theta has length " +
                     std::to_string(config.theta.size()) + " for " +
                     std::to_string(data.d()) + "-dimensional data");
  }
  for (Eigen::Index p = 0; p < config.theta.size(); ++p) {
    if (config.theta[p] < config.theta_lo || config.theta[p] > config.theta_hi) {
      throw DomainError("gp_fit: theta[" + std::to_string(p) +
                        "] outside [theta_lo, theta_hi]");
    }
  }
  GPFit fit;
  fit.config = config;
  fit.data = data;
  fit.chol = factor_or_throw(config.theta, data.inputs, config.nugget_g,
                             "gp_fit");
  const Eigen::VectorXd a =
      fit.chol.triangularView<Eigen::Lower>().solve(data.responses);
  const double quad = a.squaredNorm();
  const double logdet = 2.0 * fit.chol.diagonal().array().log().sum();
  const double n = static_cast<double>(data.n());
  fit.sigma2_hat = quad / n;
  fit.loglik = -(n / 2.0) * std::log(quad) - 0.5 * logdet;
  return fit;
}

PosteriorPrediction predict(const GPFit& fit, const Eigen::MatrixXd& Xstar) {
  const Eigen::Index d = fit.data.d();
  if (Xstar.cols() != d) {
    throw ShapeError("predict: query points have " +
                     std::to_string(Xstar.cols()) + " columns, expected " +
                     std::to_string(d));
  }
  const Eigen::Index m = Xstar.rows();
  const auto L = fit.chol.triangularView<Eigen::Lower>();

  const Eigen::MatrixXd Rsx =
      kernel_matrix(Xstar, fit.data.inputs, fit.config.theta);
  const Eigen::VectorXd alpha =
      L.transpose().solve(L.solve(fit.data.responses));

  PosteriorPrediction out;
  out.mean = Rsx * alpha;

  // Conditional correlation with the nugget kept on the predictive diagonal.
  const Eigen::MatrixXd V = L.solve(Rsx.transpose());
  Eigen::MatrixXd cond = kernel_matrix(Xstar, Xstar, fit.config.theta);
  cond.diagonal().array() += fit.config.nugget_g;
  cond.noalias() -= V.transpose() * V;

  // Floating-point asymmetry and tiny negative variances are artifacts of
  // cancellation; symmetrize and clamp before anything downstream factors it.
  cond = 0.5 * (cond + cond.transpose()).eval();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (cond(i, i) < 0.0) cond(i, i) = 0.0;
  }
  out.cond_corr = cond;
  out.cov = fit.sigma2_hat * cond;
  out.point_var = out.cov.diagonal();
  return out;
}

}  // namespace gppen
