#pragma once

// Reusable engines behind the gp-penalty subcommands. Each run_* function
// does the computation and builds the report tables; writing files and
// printing is left to the caller so the engines stay testable in-process.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gppenalty/csv.hpp"
#include "gppenalty/cv.hpp"
#include "gppenalty/dataset.hpp"
#include "gppenalty/optimize.hpp"
#include "gppenalty/penalty.hpp"
#include "gppenalty/testfuncs.hpp"

namespace gppen::studies {

// Fixed nugget used by every experiment.
inline constexpr double kNuggetG = 1e-5;

// Version stamp carried in every JSON summary.
inline constexpr int kSchemaVersion = 1;

// Search box for the one-dimensional demonstrations and the piston slap
// data: theta in [1e-3, 1e2].
OptimConfig demo_optim_config();

// Search box for the simulation study: theta in [1e-3, 1e3].
OptimConfig study_optim_config();

// ---------------------------------------------------------------------------
// demo: profile likelihoods, a penalization path, and predictive curves for
// the sine or forrester demonstration.

struct DemoReport {
  CsvTable training_data;       // x1,y in natural units
  CsvTable profile_loglik;      // theta, nugget/MP/plain likelihood columns
  CsvTable lambda_path;         // lambda, theta_hat, sigma2_hat
  CsvTable predictive_mle;      // x, mean, sd (natural units)
  CsvTable predictive_penalized;
  double showcased_lambda = 0.0;  // 0.01 for sine, 0.004 for forrester
};

DemoReport run_demo(TestFunction which);

// Write every table under out_dir (created if missing) with the function
// name as file prefix; returns the paths written.
std::vector<std::string> write_demo(const DemoReport& report,
                                    TestFunction which,
                                    const std::string& out_dir);

// ---------------------------------------------------------------------------
// cv: one cross-validation curve plus the full-data refit at the selection.

struct CvOptions {
  MetricKind metric = MetricKind::DPE;
  int k = 0;  // folds; 0 selects leave-one-out (K = n)
  PenaltyFamily family = PenaltyFamily::lasso;
  std::vector<double> grid;  // empty selects default_lambda_grid()
  std::uint64_t seed = 0;
  bool use_1se = false;  // refit at lambda_1se instead of lambda_star
  OptimConfig optim;     // box, starts, iteration caps
};

struct CvReport {
  CVCurve curve;
  double lambda_selected = 0.0;
  FitResult final_fit;        // full-data refit at lambda_selected
  double final_sigma2 = 0.0;
  CsvTable curve_table;       // lambda, fold, metric_value, sigma2_hat, theta
  std::string summary_json;
};

CvReport run_cv(const Dataset& data, const CvOptions& options);

std::vector<std::string> write_cv(const CvReport& report,
                                  const std::string& out_dir);

// ---------------------------------------------------------------------------
// sim-study: repeated fresh-design comparison of tuning strategies against
// the oracle pMLE* baseline.

// Method roster, also the method_id coding used in the report tables.
enum class Method : int {
  mle = 0,
  pe = 1,
  md = 2,
  score = 3,
  dpe = 4,
  dpe_1se = 5,
  pmle_star = 6,
};
inline constexpr int kMethodCount = 7;

const char* method_name(Method m);

struct SimStudyOptions {
  TestFunction function = TestFunction::lim;
  int reps = 20;
  std::uint64_t seed = 0;
  int cv_k = 5;
  std::vector<double> grid;  // empty selects default_lambda_grid()
  OptimConfig optim;         // defaults to study_optim_config()

  SimStudyOptions() : optim(study_optim_config()) {}
};

struct MethodRecord {
  int rep = 0;
  Method method = Method::mle;
  double lambda = 0.0;
  Eigen::VectorXd theta_hat;
  double sigma2_hat = 0.0;
  double rmse = 0.0;
  double crps = 0.0;
};

struct SimStudyReport {
  std::vector<MethodRecord> records;  // reps x methods, rep-major
  // Median over reps of (metric_method - metric_pmle*) / metric_pmle*.
  std::array<double, kMethodCount> median_rmse_gap{};
  std::array<double, kMethodCount> median_crps_gap{};
  CsvTable records_table;  // rep, method_id, lambda, sigma2, rmse, crps, theta
  CsvTable summary_table;  // method_id, median gaps
  std::string summary_json;
};

SimStudyReport run_sim_study(const SimStudyOptions& options);

std::vector<std::string> write_sim_study(const SimStudyReport& report,
                                         const std::string& out_dir);

// ---------------------------------------------------------------------------
// piston: the slap-noise case study. MLE and LOOCV-PE once, then repeated
// randomized 4-fold CV under PE, DPE, and DPE with the one-standard-error
// rule. Without a test CSV (the original test set was never published) the
// tally compares each selection's full-data theta-hat against the MLE's;
// with one, RMSE/CRPS columns are filled in as well.

enum class PistonMetric : int { pe = 0, dpe = 1, dpe_1se = 2 };
inline constexpr int kPistonMetricCount = 3;

const char* piston_metric_name(PistonMetric m);

struct PistonOptions {
  int reps = 100;
  std::uint64_t seed = 0;
  std::vector<double> grid;  // empty selects default_lambda_grid()
  std::string test_csv;      // optional path to a held-out x1..x6,y table
  OptimConfig optim;         // defaults to demo_optim_config()

  PistonOptions() : optim(demo_optim_config()) {}
};

struct PistonScenario {
  std::string name;
  double lambda = 0.0;
  Eigen::VectorXd theta_hat;
  double sigma2_hat = 0.0;
  double rmse = 0.0;  // NaN without a test set
  double crps = 0.0;  // NaN without a test set
};

struct PistonTally {
  PistonMetric metric = PistonMetric::pe;
  int n_equal_mle = 0;   // theta-hat within 1e-6 per coordinate of the MLE
  int n_different = 0;
  int n_rmse_less = 0;   // only populated with a test set
  int n_rmse_greater = 0;
};

struct PistonReport {
  bool have_test_set = false;
  std::vector<PistonScenario> scenarios;  // MLE, LOOCV-PE, modal 4-fold picks
  std::array<PistonTally, kPistonMetricCount> tallies;
  CsvTable selections_table;  // rep, metric_id, lambda, equal flag [, rmse]
  CsvTable tally_table;
  CsvTable parameters_table;  // scenario_id, lambda, sigma2, theta_1..6
  std::string summary_json;
};

PistonReport run_piston(const PistonOptions& options);

std::vector<std::string> write_piston(const PistonReport& report,
                                      const std::string& out_dir);

// ---------------------------------------------------------------------------
// Shared plumbing.

// Create out_dir if needed and write `content` to out_dir/name.
// Throws IoError on failure.
std::string write_text_file(const std::string& out_dir,
                            const std::string& name,
                            const std::string& content);

// CSV writer that routes through write_text_file, returning the path.
std::string write_table(const std::string& out_dir, const std::string& name,
                        const CsvTable& table);

// Build a Dataset from a natural-unit x1..xd,y CSV file: inputs scaled by
// the observed per-column min/max, responses centered.
Dataset dataset_from_csv_file(const std::string& path);

}  // namespace gppen::studies
