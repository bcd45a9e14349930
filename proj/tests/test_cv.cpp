#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "gppenalty/cv.hpp"
#include "gppenalty/errors.hpp"
#include "gppenalty/gp.hpp"
#include "gppenalty/rng.hpp"
#include "gppenalty/testfuncs.hpp"

using namespace gppen;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Minimal curve builder for exercising the selection rules directly.
CVCurve toy_curve(const std::vector<double>& grid,
                  const std::vector<double>& mean,
                  const std::vector<double>& se,
                  const std::vector<bool>& eligible) {
  CVCurve curve;
  curve.grid = grid;
  curve.mean_curve = mean;
  curve.se = se;
  curve.sd = se;
  curve.eligible = eligible;
  return curve;
}

}  // namespace

TEST_CASE("make_folds partitions every index exactly once") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(40));
    const int K = 2 + static_cast<int>(rng.uniform_int(n - 1));
    Rng fold_rng(derive_seed(61, {static_cast<std::uint64_t>(trial)}));
    const FoldPartition part = make_folds(n, K, fold_rng);
    REQUIRE(part.K == K);
    REQUIRE(static_cast<int>(part.folds.size()) == K);

    std::set<int> seen;
    for (int k = 0; k < K; ++k) {
      const auto& fold = part.folds[k];
      // Sizes differ by at most one and larger folds come first.
      const int expected = n / K + (k < n % K ? 1 : 0);
      CHECK(static_cast<int>(fold.size()) == expected);
      CHECK(std::is_sorted(fold.begin(), fold.end()));
      for (int idx : fold) {
        CHECK(idx >= 0);
        CHECK(idx < n);
        CHECK(seen.insert(idx).second);  // no duplicates across folds
      }
    }
    CHECK(static_cast<int>(seen.size()) == n);
  }
}

TEST_CASE("make_folds validates K") {
  Rng rng(62);
  CHECK_THROWS_AS(make_folds(5, 1, rng), DomainError);
  CHECK_THROWS_AS(make_folds(5, 6, rng), DomainError);
  CHECK_NOTHROW(make_folds(5, 5, rng));  // LOOCV boundary
}

TEST_CASE("fold metrics satisfy their algebraic identities") {
  const Dataset data = demo_dataset(TestFunction::forrester);
  KernelConfig config;
  config.theta = Eigen::VectorXd::Constant(1, 12.0);

  // Use the first half as training fold, second half as validation.
  Dataset train;
  train.inputs = data.inputs.topRows(5);
  train.input_lo = data.input_lo;
  train.input_hi = data.input_hi;
  double fold_mean = 0.0;
  train.responses = center_responses(data.responses.head(5), &fold_mean);

  const GPFit fit = gp_fit(train, config);
  const PosteriorPrediction pred = predict(fit, data.inputs.bottomRows(3));
  const Eigen::VectorXd y_val =
      data.responses.tail(3).array() - fold_mean;

  const double pe = metric_pe(y_val, pred);
  const double dpe = metric_dpe(y_val, pred);
  const double md = metric_md(y_val, pred);
  const double score = metric_score(y_val, pred);

  // PE from the definition.
  const Eigen::VectorXd r = y_val - pred.mean;
  CHECK(pe == doctest::Approx(r.squaredNorm()).epsilon(1e-12));

  // MD rescales DPE by the held-out scale, and Score adds log|Sigma|.
  CHECK(md == doctest::Approx(dpe / fit.sigma2_hat).epsilon(1e-9));
  const double logdet_cov =
      std::log(Eigen::MatrixXd(pred.cov).llt().matrixL().determinant()) * 2.0;
  CHECK(score == doctest::Approx(md + logdet_cov).epsilon(1e-9));

  // Direct solves against the definition.
  const double dpe_ref =
      r.dot(Eigen::MatrixXd(pred.cond_corr).llt().solve(r));
  CHECK(dpe == doctest::Approx(dpe_ref).epsilon(1e-9));
}

TEST_CASE("heldout_scale coincides with the per-n convention cross-check") {
  const Dataset data = demo_dataset(TestFunction::sine);
  const int n = static_cast<int>(data.n());
  Eigen::VectorXd theta(1);
  theta << 20.0;

  // Training fold = all but the last two points, re-centered.
  const int n_v = 2;
  Eigen::MatrixXd X_train = data.inputs.topRows(n - n_v);
  double fold_mean = 0.0;
  Eigen::VectorXd y_train =
      center_responses(data.responses.head(n - n_v), &fold_mean);

  const double held = heldout_scale(theta, X_train, y_train, 1e-5, n, n_v);
  // Dividing y'R^{-1}y by (n - n_v) is numerically the per-row convention
  // of sigma2_hat on the training fold, because the fold has n - n_v rows.
  CHECK(held ==
        doctest::Approx(sigma2_hat(theta, X_train, y_train, 1e-5))
            .epsilon(1e-12));

  CHECK_THROWS_AS(heldout_scale(theta, X_train, y_train, 1e-5, n, 3),
                  ShapeError);
}

TEST_CASE("default_lambda_grid starts at zero and spans e^-8..e^2") {
  const std::vector<double> grid = default_lambda_grid();
  REQUIRE(grid.size() == 51);
  CHECK(grid[0] == 0.0);
  CHECK(grid[1] == doctest::Approx(std::exp(-8.0)).epsilon(1e-15));
  CHECK(grid[50] == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  // Landmarks used by the demonstrations.
  CHECK(grid[13] == doctest::Approx(0.00388349).epsilon(1e-5));
  CHECK(grid[21] == doctest::Approx(0.0198735).epsilon(1e-5));
}

TEST_CASE("select_lambda breaks ties toward the smaller lambda") {
  const std::vector<double> grid = {0.0, 0.1, 0.2, 0.3};
  CVCurve curve = toy_curve(grid, {2.0, 1.0, 1.0, 1.5}, {0.1, 0.1, 0.1, 0.1},
                            {true, true, true, true});
  CHECK(select_lambda(curve) == 0.1);
}

TEST_CASE("select_lambda skips ineligible and non-finite columns") {
  const std::vector<double> grid = {0.0, 0.1, 0.2};
  CVCurve curve = toy_curve(grid, {2.0, 0.5, 1.0}, {0.1, 0.1, 0.1},
                            {true, false, true});
  CHECK(select_lambda(curve) == 0.2);

  CVCurve nan_curve = toy_curve(grid, {2.0, kNaN, 1.0}, {0.1, 0.1, 0.1},
                                {true, true, true});
  CHECK(select_lambda(nan_curve) == 0.2);

  CVCurve dead = toy_curve(grid, {kNaN, kNaN, kNaN}, {0.1, 0.1, 0.1},
                           {false, false, false});
  CHECK_THROWS_AS(select_lambda(dead), SelectionError);
}

TEST_CASE("select_lambda_1se takes the largest lambda under the threshold") {
  const std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4};
  // Minimum at lambda=0.1 (value 1.0, se 0.5): threshold 1.5 admits 0.2
  // (1.4) and 0.4 (1.45) but not 0.3 (1.6); the rule takes the largest.
  CVCurve curve = toy_curve(grid, {2.0, 1.0, 1.4, 1.6, 1.45},
                            {0.2, 0.5, 0.2, 0.2, 0.2},
                            {true, true, true, true, true});
  curve.lambda_star = select_lambda(curve);
  CHECK(curve.lambda_star == 0.1);
  CHECK(select_lambda_1se(curve) == 0.4);

  // With a tiny SE the rule degenerates to lambda_star itself.
  CVCurve tight = toy_curve(grid, {2.0, 1.0, 1.4, 1.6, 1.45},
                            {0.0, 0.0, 0.0, 0.0, 0.0},
                            {true, true, true, true, true});
  tight.lambda_star = select_lambda(tight);
  CHECK(select_lambda_1se(tight) == 0.1);
}

TEST_CASE("cv_cells fills every cell deterministically") {
  const Dataset data = demo_dataset(TestFunction::forrester);
  Rng fold_rng(derive_seed(7, {0}));
  const FoldPartition part = make_folds(static_cast<int>(data.n()), 4,
                                        fold_rng);
  const std::vector<double> grid = {0.0, 0.02, 0.1};
  OptimConfig config;
  config.theta_hi = 100.0;
  config.n_starts = 5;

  const CVCellTable cells =
      cv_cells(data, part, grid, PenaltyFamily::lasso, 1e-5, config, 7);
  REQUIRE(cells.K == 4);
  REQUIRE(cells.pe.rows() == 4);
  REQUIRE(cells.pe.cols() == 3);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::isfinite(cells.pe(k, j)));
      CHECK(std::isfinite(cells.dpe(k, j)));
      CHECK(std::isfinite(cells.md(k, j)));
      CHECK(std::isfinite(cells.score(k, j)));
      CHECK(cells.sigma2(k, j) > 0.0);
      CHECK(cells.theta[k][j].size() == 1);
    }
  }

  // Parallel scheduling must not affect a single value: force one worker
  // and compare bit-for-bit.
  setenv("GP_PENALTY_THREADS", "1", 1);
  const CVCellTable serial =
      cv_cells(data, part, grid, PenaltyFamily::lasso, 1e-5, config, 7);
  unsetenv("GP_PENALTY_THREADS");
  CHECK(cells.pe == serial.pe);
  CHECK(cells.dpe == serial.dpe);
  CHECK(cells.md == serial.md);
  CHECK(cells.score == serial.score);
  CHECK(cells.sigma2 == serial.sigma2);
}

TEST_CASE("curve_from_cells aggregates and selects") {
  const Dataset data = demo_dataset(TestFunction::forrester);
  Rng fold_rng(derive_seed(11, {0}));
  const FoldPartition part = make_folds(static_cast<int>(data.n()), 4,
                                        fold_rng);
  const std::vector<double> grid = {0.0, 0.02, 0.1};
  OptimConfig config;
  config.theta_hi = 100.0;
  config.n_starts = 5;
  const CVCellTable cells =
      cv_cells(data, part, grid, PenaltyFamily::lasso, 1e-5, config, 11);

  const CVCurve curve = curve_from_cells(cells, MetricKind::DPE);
  REQUIRE(curve.mean_curve.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(curve.eligible[j]);
    double mean = 0.0;
    for (int k = 0; k < 4; ++k) mean += cells.dpe(k, j) / 4.0;
    CHECK(curve.mean_curve[j] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(curve.se[j] == doctest::Approx(curve.sd[j] / 2.0).epsilon(1e-12));
  }
  // Selection landed on a grid point and the 1SE pick is never smaller.
  CHECK(std::find(grid.begin(), grid.end(), curve.lambda_star) != grid.end());
  CHECK(curve.lambda_1se >= curve.lambda_star);
}

TEST_CASE("cv_curve validates the grid") {
  const Dataset data = demo_dataset(TestFunction::sine);
  Rng fold_rng(1);
  const FoldPartition part = make_folds(static_cast<int>(data.n()), 3,
                                        fold_rng);
  OptimConfig config;
  CHECK_THROWS_AS(cv_curve(data, part, {}, MetricKind::PE,
                           PenaltyFamily::lasso, 1e-5, config, 0),
                  DomainError);
  CHECK_THROWS_AS(cv_curve(data, part, {0.1, 0.0}, MetricKind::PE,
                           PenaltyFamily::lasso, 1e-5, config, 0),
                  DomainError);
  CHECK_THROWS_AS(cv_curve(data, part, {-0.1, 0.0}, MetricKind::PE,
                           PenaltyFamily::lasso, 1e-5, config, 0),
                  DomainError);
}
