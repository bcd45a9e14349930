#pragma once

#include <Eigen/Core>

#include "gppenalty/dataset.hpp"
#include "gppenalty/kernel.hpp"

namespace gppen {

// A Gaussian-process surrogate conditioned on a dataset at fixed
// hyperparameters. Immutable after construction; safe to share across
// threads.
struct GPFit {
  KernelConfig config;
  Dataset data;
  Eigen::MatrixXd chol;     // lower-triangular factor of R_n (nugget included)
  double sigma2_hat = 0.0;  // closed-form scale MLE y'R_n^{-1}y / n
  double loglik = 0.0;      // profile log likelihood at config.theta
};

// Posterior predictive distribution at m query points.
struct PosteriorPrediction {
  Eigen::VectorXd mean;       // length m, in the centered-response frame
  Eigen::MatrixXd cond_corr;  // m x m conditional correlation (nugget on diag)
  Eigen::MatrixXd cov;        // sigma2_hat * cond_corr
  Eigen::VectorXd point_var;  // diagonal of cov
};

// In-place lower Cholesky factorization of a symmetric positive-definite
// matrix. On success returns -1 and leaves the factor in the lower triangle
// (upper triangle zeroed). On failure returns the pivot index at which the
// factorization broke down, leaving A partially overwritten.
int cholesky_in_place(Eigen::MatrixXd& A);

// Profile log likelihood of Eq.-(2) form with the scale concentrated out:
//   -(n/2) * log(y'R_n^{-1}y) - (1/2) * log|R_n|,
// additive constants dropped. All solves go through the Cholesky factor.
//
// Throws EmptyDataError when n = 0, DomainError for nonpositive theta, and
// NumericError (carrying theta and the failing pivot) when R_n is not
// positive definite even with the nugget.
double profile_loglik(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double g);
double profile_loglik(const Eigen::VectorXd& theta, const Dataset& data,
                      double g);

// Moore-Penrose variant of the profile log likelihood, reproducing the
// classical failure mode of working without a nugget: the quadratic term
// uses the pseudoinverse (eigenvalues <= eig_tol dropped), while the
// log-determinant keeps every computed eigenvalue, with magnitudes floored
// at the eigensolver's absolute error scale n * eps * max|w|. Returns -inf
// when no eigenvalue survives the threshold.
double profile_loglik_mp(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& y, double eig_tol = 0.0);
double profile_loglik_mp(const Eigen::VectorXd& theta, const Dataset& data,
                         double eig_tol = 0.0);

// Closed-form scale MLE y'R_n^{-1}y / n. Same error behavior as
// profile_loglik.
double sigma2_hat(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                  const Eigen::VectorXd& y, double g);
double sigma2_hat(const Eigen::VectorXd& theta, const Dataset& data, double g);

// Analytic gradient of profile_loglik with respect to theta:
//   d/d theta_p = (n/2) * (a'M_p a)/(y'a) - (1/2) * tr(R_n^{-1} M_p),
// where a = R_n^{-1}y and M_p = -(x_ip - x_jp)^2 * R (nugget-free R).
Eigen::VectorXd grad_profile_loglik(const Eigen::VectorXd& theta,
                                    const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y, double g);

// Condition a GP on the dataset at the hyperparameters in config.
// Validates that config.theta lies within [theta_lo, theta_hi].
GPFit gp_fit(const Dataset& data, const KernelConfig& config);

// Posterior predictive mean and covariance at query points (scaled units):
//   mean      = R(X*, X_n) R_n^{-1} y
//   cond_corr = R(X*, X*) + g I - R(X*, X_n) R_n^{-1} R(X_n, X*),
// symmetrized as (A + A')/2 with diagonal clamped at 0, and cov =
// sigma2_hat * cond_corr. Throws ShapeError when Xstar's column count does
// not match the training dimension.
PosteriorPrediction predict(const GPFit& fit, const Eigen::MatrixXd& Xstar);

}  // namespace gppen
