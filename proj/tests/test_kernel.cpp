#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "gppenalty/errors.hpp"
#include "gppenalty/kernel.hpp"
#include "gppenalty/rng.hpp"

using namespace gppen;

namespace {

// Element-by-element reference written straight from the kernel definition.
double ref_entry(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b,
                 const Eigen::VectorXd& theta) {
  double s = 0.0;
  for (int p = 0; p < theta.size(); ++p) {
    s += theta[p] * (a[p] - b[p]) * (a[p] - b[p]);
  }
  return std::exp(-s);
}

Eigen::MatrixXd random_points(int n, int d, Rng& rng) {
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < d; ++p) X(i, p) = rng.uniform01();
  return X;
}

}  // namespace

TEST_CASE("kernel_matrix matches the elementwise definition") {
  Rng rng(31);
  const Eigen::MatrixXd X1 = random_points(7, 3, rng);
  const Eigen::MatrixXd X2 = random_points(5, 3, rng);
  Eigen::VectorXd theta(3);
  theta << 0.5, 2.0, 17.0;

  const Eigen::MatrixXd K = kernel_matrix(X1, X2, theta);
  REQUIRE(K.rows() == 7);
  REQUIRE(K.cols() == 5);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(K(i, j) == doctest::Approx(ref_entry(X1.row(i), X2.row(j), theta))
                           .epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel_matrix on one point set is symmetric with unit diagonal") {
  Rng rng(32);
  const Eigen::MatrixXd X = random_points(6, 2, rng);
  Eigen::VectorXd theta(2);
  theta << 1.0, 3.0;

  const Eigen::MatrixXd K = kernel_matrix(X, X, theta);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  for (int i = 0; i < 6; ++i) CHECK(K(i, i) == 1.0);

  const double g = 1e-5;
  const Eigen::MatrixXd Kn = kernel_matrix(X, X, theta, g, true);
  for (int i = 0; i < 6; ++i) CHECK(Kn(i, i) == doctest::Approx(1.0 + g));
  // Off-diagonal entries are untouched by the nugget.
  CHECK(Kn(0, 1) == K(0, 1));
}

TEST_CASE("kernel_matrix validates its arguments") {
  Rng rng(33);
  const Eigen::MatrixXd X1 = random_points(4, 2, rng);
  const Eigen::MatrixXd X2 = random_points(3, 2, rng);
  Eigen::VectorXd theta(2);
  theta << 1.0, 1.0;

  Eigen::VectorXd bad_theta(2);
  bad_theta << 1.0, 0.0;
  CHECK_THROWS_AS(kernel_matrix(X1, X1, bad_theta), DomainError);

  Eigen::VectorXd short_theta(1);
  short_theta << 1.0;
  CHECK_THROWS_AS(kernel_matrix(X1, X1, short_theta), ShapeError);

  Eigen::MatrixXd X3 = random_points(3, 3, rng);
  CHECK_THROWS_AS(kernel_matrix(X1, X3, theta), ShapeError);

  // Nugget on a non-square matrix makes no sense.
  CHECK_THROWS_AS(kernel_matrix(X1, X2, theta, 1e-5, true), ShapeError);
}
