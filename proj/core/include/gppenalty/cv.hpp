#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gppenalty/dataset.hpp"
#include "gppenalty/gp.hpp"
#include "gppenalty/optimize.hpp"
#include "gppenalty/penalty.hpp"
#include "gppenalty/rng.hpp"

namespace gppen {

// K disjoint validation index sets covering {0, ..., n-1}, sizes differing
// by at most one.
struct FoldPartition {
  int K = 0;
  std::vector<std::vector<int>> folds;
};

enum class MetricKind { PE, MD, Score, DPE };

// Cross-validation curve of one metric over a lambda grid, with the
// aggregates needed for the selection rules. Cells where the optimizer (or
// a downstream factorization) failed hold NaN; a lambda column containing
// any such cell is flagged ineligible and can never be selected.
struct CVCurve {
  std::vector<double> grid;     // sorted lambda values, >= 0
  Eigen::MatrixXd per_fold;     // K x |grid| metric values (NaN = invalid)
  std::vector<double> mean_curve;  // column means over valid cells
  std::vector<double> sd;          // column sample SD (K-1 denominator)
  std::vector<double> se;          // sd / sqrt(K)
  std::vector<bool> eligible;      // column has all K cells valid
  double lambda_star = 0.0;
  double lambda_1se = 0.0;
  // Diagnostics: per-cell hyperparameter estimates and held-out scales.
  std::vector<std::vector<Eigen::VectorXd>> per_fold_theta;  // [k][j]
  Eigen::MatrixXd per_fold_sigma2;                           // K x |grid|
};

// All four metrics computed from one shared fit per (fold, lambda) cell,
// so a caller needing several metric curves pays the optimizer cost once.
struct CVCellTable {
  std::vector<double> grid;
  int K = 0;
  Eigen::MatrixXd pe, md, score, dpe;  // K x |grid| each, NaN = invalid
  Eigen::MatrixXd sigma2;              // K x |grid| held-out scales
  std::vector<std::vector<Eigen::VectorXd>> theta;  // [k][j]
};

// Uniformly random partition into K near-equal folds; K = n gives LOOCV.
// Throws DomainError unless 2 <= K <= n.
FoldPartition make_folds(int n, int K, Rng& rng);

// Squared prediction error (y_k - mean)'(y_k - mean).
double metric_pe(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred);

// Mahalanobis distance r' Sigma^{-1} r with Sigma = pred.cov (the held-out
// scale times the conditional correlation). Warns once per process when
// called with a single validation point. Throws NumericError when Sigma is
// not factorizable.
double metric_md(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred);

// metric_md plus log|Sigma| (proportional to the held-out negative log
// likelihood). Same warnings/errors as metric_md.
double metric_score(const Eigen::VectorXd& y_k,
                    const PosteriorPrediction& pred);

// Decorrelated prediction error r' R^{-1} r against the conditional
// correlation matrix (scale-free, no n_v >= 2 recommendation).
double metric_dpe(const Eigen::VectorXd& y_k, const PosteriorPrediction& pred);

// Held-out scale estimate sigma2_{lambda,-k} = y'R^{-1}y / (n - n_v)
// computed on the training fold, with the denominator written exactly as
// the full count minus the validation count. Numerically this coincides
// with the per-n convention of gp_fit applied to the training fold (the
// cross-check lives in the test suite); it is kept as its own code path
// because the two conventions differ on any other input.
// Throws ShapeError unless X_train has exactly n_total - n_v rows.
double heldout_scale(const Eigen::VectorXd& theta,
                     const Eigen::MatrixXd& X_train,
                     const Eigen::VectorXd& y_train, double g, int n_total,
                     int n_v);

// Fit every (fold, lambda) cell and record all four metrics. Responses are
// re-centered within each training fold (the validation responses are
// shifted by the same training-fold mean). Cells run concurrently (capped
// by the GP_PENALTY_THREADS environment variable); each derives its RNG
// from (seed, fold, lambda index), so results are deterministic regardless
// of scheduling. Failed cells are NaN and reported on stderr.
// lambda = 0 cells are fit with the penalty disabled.
CVCellTable cv_cells(const Dataset& data, const FoldPartition& partition,
                     const std::vector<double>& grid, PenaltyFamily family,
                     double g, const OptimConfig& config, std::uint64_t seed);

// Reduce one metric out of a cell table: aggregates, eligibility, and both
// selections. Throws SelectionError when no column is eligible.
CVCurve curve_from_cells(const CVCellTable& cells, MetricKind metric);

// Convenience: cv_cells followed by curve_from_cells.
// Throws DomainError when the grid is empty, unsorted, or has negative
// entries.
CVCurve cv_curve(const Dataset& data, const FoldPartition& partition,
                 const std::vector<double>& grid, MetricKind metric,
                 PenaltyFamily family, double g, const OptimConfig& config,
                 std::uint64_t seed);

// Grid-point lambda minimizing the mean curve; ties break toward the
// smaller lambda. Throws SelectionError when no column is eligible.
double select_lambda(const CVCurve& curve);

// Largest eligible lambda whose mean curve value is within one standard
// error of the minimum: max{lambda : C(lambda) <= C(lambda*) + SE(lambda*)}.
// Always >= select_lambda(curve).
double select_lambda_1se(const CVCurve& curve);

// The library's default search grid: {0} followed by 50 log-spaced points
// from e^-8 to e^2 (~7.389).
std::vector<double> default_lambda_grid();

}  // namespace gppen
