#include "gppenalty/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gppenalty/errors.hpp"

namespace gppen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Factor a copy of a symmetric matrix, throwing NumericError on failure.
Eigen::MatrixXd factor_metric_matrix(const Eigen::MatrixXd& S,
                                     const char* who) {
  Eigen::MatrixXd L = S;
  const int pivot = cholesky_in_place(L);
  if (pivot >= 0) {
    throw NumericError(std::string(who) +
                           ": predictive matrix not positive definite at "
                           "pivot " + std::to_string(pivot),
                       {}, pivot);
  }
  return L;
}

void warn_small_validation_fold() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true)) {
    std::cerr << "warning: MD/Score computed with a single validation point; "
                 "n_v >= 2 is recommended for these metrics\n";
  }
}

int worker_count(int n_cells) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("GP_PENALTY_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < threads) threads = cap;
  }
  return std::min(threads, n_cells);
}

double column_mean_over_valid(const Eigen::MatrixXd& M, int j, int* n_valid) {
  double sum = 0.0;
  int count = 0;
  for (int k = 0; k < M.rows(); ++k) {
    if (std::isfinite(M(k, j))) {
      sum += M(k, j);
      ++count;
    }
  }
  *n_valid = count;
  return count > 0 ? sum / count : kNaN;
}

}  // namespace

FoldPartition make_folds(int n, int K, Rng& rng) {
  if (K < 2 || K > n) {
    throw DomainError("make_folds: K = " + std::to_string(K) +
                      " outside [2, n] for n = " + std::to_string(n));
  }
  const std::vector<int> order = rng.permutation(n);
  FoldPartition partition;
  partition.K = K;
  partition.folds.resize(K);
  int at = 0;
  for (int i = 0; i < K; ++i) {
    const int size = n / K + (i < n % K ? 1 : 0);
    partition.folds[i].assign(order.begin() + at, order.begin() + at + size);
    std::sort(partition.folds[i].begin(), partition.folds[i].end());
    at += size;
  }
  return partition;
}

double metric_pe(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred) {
  if (y_k.size() != pred.mean.size()) {
    throw ShapeError("metric_pe: " + std::to_string(y_k.size()) +
                     " responses vs " + std::to_string(pred.mean.size()) +
                     " predictions");
  }
  return (y_k - pred.mean).squaredNorm();
}

double metric_md(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred) {
  if (y_k.size() != pred.mean.size()) {
    throw ShapeError("metric_md: response/prediction length mismatch");
  }
  if (y_k.size() < 2) warn_small_validation_fold();
  const Eigen::MatrixXd L = factor_metric_matrix(pred.cov, "metric_md");
  const Eigen::VectorXd v =
      L.triangularView<Eigen::Lower>().solve(y_k - pred.mean);
  return v.squaredNorm();
}

double metric_score(const Eigen::VectorXd& y_k,
                    const PosteriorPrediction& pred) {
  if (y_k.size() != pred.mean.size()) {
    throw ShapeError("metric_score: response/prediction length mismatch");
  }
  if (y_k.size() < 2) warn_small_validation_fold();
  const Eigen::MatrixXd L = factor_metric_matrix(pred.cov, "metric_score");
  const Eigen::VectorXd v =
      L.triangularView<Eigen::Lower>().solve(y_k - pred.mean);
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  return v.squaredNorm() + logdet;
}

double metric_dpe(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred) {
  if (y_k.size() != pred.mean.size()) {
    throw ShapeError("metric_dpe: response/prediction length mismatch");
  }
  const Eigen::MatrixXd L = factor_metric_matrix(pred.cond_corr, "metric_dpe");
  const Eigen::VectorXd v =
      L.triangularView<Eigen::Lower>().solve(y_k - pred.mean);
  return v.squaredNorm();
}

double heldout_scale(const Eigen::VectorXd& theta,
                     const Eigen::MatrixXd& X_train,
                     const Eigen::VectorXd& y_train, double g, int n_total,
                     int n_v) {
  const int n_train = n_total - n_v;
  if (X_train.rows() != n_train || y_train.size() != n_train) {
    throw ShapeError("heldout_scale: training fold has " +
                     std::to_string(X_train.rows()) + " rows, expected n - "
                     "n_v = " + std::to_string(n_train));
  }
  if (n_train < 1) {
    throw EmptyDataError("heldout_scale: empty training fold");
  }
  Eigen::MatrixXd R = kernel_matrix(X_train, X_train, theta, g, true);
  const int pivot = cholesky_in_place(R);
  if (pivot >= 0) {
    throw NumericError("heldout_scale: factorization failed at pivot " +
                           std::to_string(pivot),
                       std::vector<double>(theta.data(),
                                           theta.data() + theta.size()),
                       pivot);
  }
  const Eigen::VectorXd a = R.triangularView<Eigen::Lower>().solve(y_train);
  return a.squaredNorm() / static_cast<double>(n_train);
}

CVCellTable cv_cells(const Dataset& data, const FoldPartition& partition,
                     const std::vector<double>& grid, PenaltyFamily family,
                     double g, const OptimConfig& config, std::uint64_t seed) {
  const int n = static_cast<int>(data.n());
  const int K = partition.K;
  const int J = static_cast<int>(grid.size());

  CVCellTable cells;
  cells.grid = grid;
  cells.K = K;
  cells.pe = Eigen::MatrixXd::Constant(K, J, kNaN);
  cells.md = Eigen::MatrixXd::Constant(K, J, kNaN);
  cells.score = Eigen::MatrixXd::Constant(K, J, kNaN);
  cells.dpe = Eigen::MatrixXd::Constant(K, J, kNaN);
  cells.sigma2 = Eigen::MatrixXd::Constant(K, J, kNaN);
  cells.theta.assign(K, std::vector<Eigen::VectorXd>(J));

  // Per-fold training views, shared read-only across workers.
  std::vector<Eigen::MatrixXd> X_train(K), X_val(K);
  std::vector<Eigen::VectorXd> y_train(K), y_val(K);
  for (int k = 0; k < K; ++k) {
    const std::vector<int>& vi = partition.folds[k];
    std::vector<char> in_val(n, 0);
    for (int i : vi) in_val[i] = 1;
    const int n_v = static_cast<int>(vi.size());
    const int n_t = n - n_v;
    X_train[k].resize(n_t, data.d());
    y_train[k].resize(n_t);
    X_val[k].resize(n_v, data.d());
    y_val[k].resize(n_v);
    int t = 0;
    for (int i = 0; i < n; ++i) {
      if (!in_val[i]) {
        X_train[k].row(t) = data.inputs.row(i);
        y_train[k][t] = data.responses[i];
        ++t;
      }
    }
    for (int v = 0; v < n_v; ++v) {
      X_val[k].row(v) = data.inputs.row(vi[v]);
      y_val[k][v] = data.responses[vi[v]];
    }
    // Re-center within the training fold; validation responses shift by the
    // same training-fold mean so both live in one frame.
    const double fold_mean = y_train[k].mean();
    y_train[k].array() -= fold_mean;
    y_val[k].array() -= fold_mean;
  }

  const int n_cells = K * J;
  std::atomic<int> next{0};
  std::mutex log_mutex;

  auto run_cell = [&](int k, int j) {
    const double lambda = grid[j];
    PenaltySpec spec;
    spec.family = family;
    spec.lambda = lambda;
    OptimConfig cell_config = config;
    cell_config.seed = derive_seed(
        seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j)});
    try {
      const FitResult fr =
          maximize_penalized(X_train[k], y_train[k], g, spec, cell_config);
      cells.theta[k][j] = fr.theta_hat;
      cells.sigma2(k, j) = heldout_scale(
          fr.theta_hat, X_train[k], y_train[k], g, n,
          static_cast<int>(partition.folds[k].size()));

      Dataset fold_data;
      fold_data.inputs = X_train[k];
      fold_data.responses = y_train[k];
      fold_data.input_lo = data.input_lo;
      fold_data.input_hi = data.input_hi;
      KernelConfig kcfg;
      kcfg.theta = fr.theta_hat;
      kcfg.nugget_g = g;
      kcfg.theta_lo = config.theta_lo;
      kcfg.theta_hi = config.theta_hi;
      const GPFit fit = gp_fit(fold_data, kcfg);
      const PosteriorPrediction pred = predict(fit, X_val[k]);

      cells.pe(k, j) = metric_pe(y_val[k], pred);
      cells.md(k, j) = metric_md(y_val[k], pred);
      cells.score(k, j) = metric_score(y_val[k], pred);
      cells.dpe(k, j) = metric_dpe(y_val[k], pred);
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "warning: CV cell (fold " << k << ", lambda " << lambda
                << ") invalid: " << e.what() << "\n";
    }
  };

  const int threads = worker_count(n_cells);
  if (threads <= 1) {
    for (int idx = 0; idx < n_cells; ++idx) run_cell(idx % K, idx / K);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (int idx = next.fetch_add(1); idx < n_cells;
             idx = next.fetch_add(1)) {
          run_cell(idx % K, idx / K);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return cells;
}

CVCurve curve_from_cells(const CVCellTable& cells, MetricKind metric) {
  const Eigen::MatrixXd* M = nullptr;
  switch (metric) {
    case MetricKind::PE: M = &cells.pe; break;
    case MetricKind::MD: M = &cells.md; break;
    case MetricKind::Score: M = &cells.score; break;
    case MetricKind::DPE: M = &cells.dpe; break;
  }
  const int K = cells.K;
  const int J = static_cast<int>(cells.grid.size());

  CVCurve curve;
  curve.grid = cells.grid;
  curve.per_fold = *M;
  curve.per_fold_theta = cells.theta;
  curve.per_fold_sigma2 = cells.sigma2;
  curve.mean_curve.resize(J);
  curve.sd.resize(J);
  curve.se.resize(J);
  curve.eligible.resize(J);
  const double sqrt_K = std::sqrt(static_cast<double>(K));
  for (int j = 0; j < J; ++j) {
    int n_valid = 0;
    const double mean = column_mean_over_valid(*M, j, &n_valid);
    curve.mean_curve[j] = mean;
    curve.eligible[j] = (n_valid == K);
    if (n_valid >= 2) {
      double ss = 0.0;
      for (int k = 0; k < K; ++k) {
        const double v = (*M)(k, j);
        if (std::isfinite(v)) ss += (v - mean) * (v - mean);
      }
      curve.sd[j] = std::sqrt(ss / (n_valid - 1));
      curve.se[j] = curve.sd[j] / sqrt_K;
    } else {
      curve.sd[j] = kNaN;
      curve.se[j] = kNaN;
    }
  }
  curve.lambda_star = select_lambda(curve);
  curve.lambda_1se = select_lambda_1se(curve);
  return curve;
}

CVCurve cv_curve(const Dataset& data, const FoldPartition& partition,
                 const std::vector<double>& grid, MetricKind metric,
                 PenaltyFamily family, double g, const OptimConfig& config,
                 std::uint64_t seed) {
  if (grid.empty()) {
    throw DomainError("cv_curve: empty lambda grid");
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] < 0.0) {
      throw DomainError("cv_curve: negative lambda in grid");
    }
    if (j > 0 && grid[j] < grid[j - 1]) {
      throw DomainError("cv_curve: lambda grid is not sorted");
    }
  }
  const CVCellTable cells =
      cv_cells(data, partition, grid, family, g, config, seed);
  return curve_from_cells(cells, metric);
}

double select_lambda(const CVCurve& curve) {
  int best = -1;
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    if (!curve.eligible[j] || !std::isfinite(curve.mean_curve[j])) continue;
    // Strict comparison: ties stay with the earlier (smaller) lambda.
    if (best < 0 || curve.mean_curve[j] < curve.mean_curve[best]) {
      best = static_cast<int>(j);
    }
  }
  if (best < 0) {
    throw SelectionError("select_lambda: no eligible lambda column");
  }
  return curve.grid[best];
}

double select_lambda_1se(const CVCurve& curve) {
  int best = -1;
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    if (!curve.eligible[j] || !std::isfinite(curve.mean_curve[j])) continue;
    if (best < 0 || curve.mean_curve[j] < curve.mean_curve[best]) {
      best = static_cast<int>(j);
    }
  }
  if (best < 0) {
    throw SelectionError("select_lambda_1se: no eligible lambda column");
  }
  const double threshold = curve.mean_curve[best] + curve.se[best];
  int chosen = best;
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    if (!curve.eligible[j] || !std::isfinite(curve.mean_curve[j])) continue;
    if (curve.mean_curve[j] <= threshold) chosen = static_cast<int>(j);
  }
  return curve.grid[chosen];
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  grid.reserve(51);
  grid.push_back(0.0);
  for (int i = 0; i < 50; ++i) {
    grid.push_back(std::exp(-8.0 + 10.0 * static_cast<double>(i) / 49.0));
  }
  return grid;
}

}  // namespace gppen
