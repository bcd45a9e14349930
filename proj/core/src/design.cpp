#include "gppenalty/design.hpp"

#include <vector>

#include "gppenalty/errors.hpp"

namespace gppen {

Eigen::MatrixXd lhs_design(int n, int d, Rng& rng) {
  if (n <= 0 || d <= 0) {
    throw DomainError("lhs_design: need n >= 1 and d >= 1");
  }
  Eigen::MatrixXd pts(n, d);
  for (int p = 0; p < d; ++p) {
    const std::vector<int> perm = rng.permutation(n);
    for (int i = 0; i < n; ++i) {
      pts(i, p) = (perm[i] + rng.uniform01()) / n;
    }
  }
  return pts;
}

}  // namespace gppen
