#include "gppenalty/kernel.hpp"

#include <cmath>
#include <string>

#include "gppenalty/errors.hpp"

namespace gppen {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X1,
                              const Eigen::MatrixXd& X2,
                              const Eigen::VectorXd& theta,
                              double g, bool add_nugget) {
  const Eigen::Index d = X1.cols();
  if (X2.cols() != d) {
    throw ShapeError("kernel_matrix: point sets have " + std::to_string(d) +
                     " and " + std::to_string(X2.cols()) + " columns");
  }
  if (theta.size() != d) {
    throw ShapeError("kernel_matrix: theta has length " +
                     std::to_string(theta.size()) + " for " +
                     std::to_string(d) + "-dimensional points");
  }
  for (Eigen::Index p = 0; p < d; ++p) {
    if (!(theta[p] > 0.0)) {
      throw DomainError("kernel_matrix: theta[" + std::to_string(p) +
                        "] = " + std::to_string(theta[p]) +
                        " is not positive");
    }
  }
  if (add_nugget && X1.rows() != X2.rows()) {
    throw ShapeError("kernel_matrix: nugget requested on a non-square matrix");
  }

  const Eigen::Index m = X1.rows();
  const Eigen::Index n = X2.rows();
  Eigen::MatrixXd K(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double s = 0.0;
      for (Eigen::Index p = 0; p < d; ++p) {
        const double diff = X1(i, p) - X2(j, p);
        s += theta[p] * diff * diff;
      }
      K(i, j) = std::exp(-s);
    }
  }
  if (add_nugget) {
    K.diagonal().array() += g;
  }
  return K;
}

}  // namespace gppen
