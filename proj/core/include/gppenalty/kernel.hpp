#pragma once

#include <Eigen/Core>

namespace gppen {

// Anisotropic Gaussian correlation kernel with a fixed nugget:
//   R(x_i, x_j) = exp(-sum_p theta_p (x_ip - x_jp)^2) + g * 1{i == j}.
// theta stores inverse-squared lengthscales, so larger theta_p means faster
// correlation decay along dimension p. The nugget g is a modeling constant,
// never estimated.
struct KernelConfig {
  Eigen::VectorXd theta;     // length d, positive
  double nugget_g = 1e-5;    // fixed diagonal jitter, > 0
  double theta_lo = 1e-3;    // box bounds the optimizer searches within
  double theta_hi = 1e3;
};

// Correlation matrix between two point sets (m x d and n x d). With
// add_nugget set, g is added to the diagonal; that only makes sense when X1
// and X2 are the same point set, so the matrix must be square.
//
// Throws DomainError when some theta_p <= 0, ShapeError on column-count or
// theta-length mismatch (or a non-square nugget request).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X1,
                              const Eigen::MatrixXd& X2,
                              const Eigen::VectorXd& theta,
                              double g = 0.0,
                              bool add_nugget = false);

}  // namespace gppen
