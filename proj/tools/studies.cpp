#include "studies.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "gppenalty/assess.hpp"
#include "gppenalty/design.hpp"
#include "gppenalty/errors.hpp"
#include "gppenalty/gp.hpp"
#include "gppenalty/piston.hpp"
#include "gppenalty/rng.hpp"

namespace gppen::studies {

namespace {

using nlohmann::json;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> grid_or_default(const std::vector<double>& grid) {
  return grid.empty() ? default_lambda_grid() : grid;
}

PenaltySpec spec_at(PenaltyFamily family, double lambda) {
  PenaltySpec spec;
  spec.family = family;
  spec.lambda = lambda;
  return spec;
}

const char* metric_kind_name(MetricKind m) {
  switch (m) {
    case MetricKind::PE: return "pe";
    case MetricKind::MD: return "md";
    case MetricKind::Score: return "score";
    case MetricKind::DPE: return "dpe";
  }
  return "?";
}

const char* family_name(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::none: return "none";
    case PenaltyFamily::lasso: return "lasso";
    case PenaltyFamily::scad: return "scad";
  }
  return "?";
}

// Median that ignores NaN entries; NaN when nothing is left.
double nan_median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](double x) { return std::isnan(x); }),
          v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json json_vector(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

json json_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// Predictive mean and spread mapped back to natural response units.
struct NaturalPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

NaturalPrediction predict_natural(const GPFit& fit,
                                  const Eigen::MatrixXd& X_scaled) {
  const PosteriorPrediction pred = predict(fit, X_scaled);
  NaturalPrediction out;
  out.mean = (pred.mean.array() * fit.data.response_scale +
              fit.data.response_mean)
                 .matrix();
  out.sd = (pred.point_var.array().max(0.0).sqrt() *
            fit.data.response_scale)
               .matrix();
  return out;
}

GPFit fit_at_theta(const Dataset& data, const Eigen::VectorXd& theta,
                   const OptimConfig& optim) {
  KernelConfig config;
  config.theta = theta;
  config.nugget_g = kNuggetG;
  config.theta_lo = optim.theta_lo;
  config.theta_hi = optim.theta_hi;
  return gp_fit(data, config);
}

// One full-data fit plus its test-set assessment (NaN without a test set).
struct FullFit {
  Eigen::VectorXd theta_hat;
  double sigma2_hat = kNaN;
  double rmse = kNaN;
  double crps = kNaN;
  bool ok = false;
};

FullFit full_data_fit(const Dataset& data, PenaltyFamily family, double lambda,
                      const OptimConfig& base, std::uint64_t seed,
                      const Eigen::MatrixXd* X_test_scaled,
                      const Eigen::VectorXd* y_test_natural) {
  FullFit out;
  OptimConfig config = base;
  config.seed = seed;
  try {
    const FitResult fit =
        maximize_penalized(data, kNuggetG, spec_at(family, lambda), config);
    out.theta_hat = fit.theta_hat;
    out.sigma2_hat = sigma2_hat(fit.theta_hat, data, kNuggetG);
    out.ok = true;
    if (X_test_scaled != nullptr && y_test_natural != nullptr) {
      const GPFit gp = fit_at_theta(data, fit.theta_hat, config);
      const NaturalPrediction pred = predict_natural(gp, *X_test_scaled);
      out.rmse = rmse(*y_test_natural, pred.mean);
      out.crps = crps(*y_test_natural, pred.mean, pred.sd);
    }
  } catch (const Error& e) {
    std::cerr << "full-data fit at lambda=" << lambda << " failed: "
              << e.what() << "\n";
  }
  return out;
}

std::vector<std::string> theta_headers(int d) {
  std::vector<std::string> names;
  for (int p = 0; p < d; ++p) names.push_back("theta_" + std::to_string(p + 1));
  return names;
}

}  // namespace

OptimConfig demo_optim_config() {
  OptimConfig config;
  config.theta_lo = 1e-3;
  config.theta_hi = 1e2;
  return config;
}

OptimConfig study_optim_config() {
  OptimConfig config;
  config.theta_lo = 1e-3;
  config.theta_hi = 1e3;
  return config;
}

// ---------------------------------------------------------------------------
// demo

DemoReport run_demo(TestFunction which) {
  if (which != TestFunction::sine && which != TestFunction::forrester) {
    throw DomainError("demo supports the sine and forrester functions");
  }
  const Dataset data = demo_dataset(which);
  const OptimConfig base = demo_optim_config();

  DemoReport report;
  report.showcased_lambda = which == TestFunction::sine ? 0.01 : 0.004;

  report.training_data = dataset_table(
      unscale_inputs(data.inputs, data.input_lo, data.input_hi),
      (data.responses.array() * data.response_scale + data.response_mean)
          .matrix());

  // Profile log likelihood panel: the nugget likelihood, the Moore-Penrose
  // pathology, and the bare no-nugget likelihood (NaN where the correlation
  // matrix loses positive definiteness).
  report.profile_loglik.header = {"theta", "loglik_nugget", "loglik_mp",
                                  "loglik_plain"};
  const int n_theta = 200;
  const double log_lo = std::log(base.theta_lo);
  const double log_hi = std::log(base.theta_hi);
  for (int i = 0; i < n_theta; ++i) {
    Eigen::VectorXd theta(1);
    theta << std::exp(log_lo + (log_hi - log_lo) * i / (n_theta - 1.0));
    double plain = kNaN;
    try {
      plain = profile_loglik(theta, data, 0.0);
    } catch (const NumericError&) {
    }
    report.profile_loglik.rows.push_back(
        {theta[0], profile_loglik(theta, data, kNuggetG),
         profile_loglik_mp(theta, data, 1e-7), plain});
  }

  // Penalization path over the default grid extended by the lambdas the
  // demonstrations showcase, so those rows appear exactly.
  std::vector<double> path_grid = default_lambda_grid();
  for (double extra : {0.004, 0.01, 0.02}) path_grid.push_back(extra);
  std::sort(path_grid.begin(), path_grid.end());
  path_grid.erase(std::unique(path_grid.begin(), path_grid.end()),
                  path_grid.end());

  report.lambda_path.header = {"lambda", "theta_hat", "sigma2_hat"};
  Eigen::VectorXd theta_mle, theta_showcase;
  for (std::size_t j = 0; j < path_grid.size(); ++j) {
    OptimConfig config = base;
    config.seed = derive_seed(0, {j});
    const FitResult fit = maximize_penalized(
        data, kNuggetG, spec_at(PenaltyFamily::lasso, path_grid[j]), config);
    const double s2 = sigma2_hat(fit.theta_hat, data, kNuggetG);
    report.lambda_path.rows.push_back({path_grid[j], fit.theta_hat[0], s2});
    if (path_grid[j] == 0.0) theta_mle = fit.theta_hat;
    if (path_grid[j] == report.showcased_lambda) {
      theta_showcase = fit.theta_hat;
    }
  }

  // Predictive curves in natural units for the MLE and the showcased
  // penalized fit.
  const int n_query = 200;
  Eigen::MatrixXd query(n_query, 1);
  for (int i = 0; i < n_query; ++i) {
    query(i, 0) = data.input_lo[0] +
                  (data.input_hi[0] - data.input_lo[0]) * i / (n_query - 1.0);
  }
  const Eigen::MatrixXd query_scaled =
      scale_inputs(query, data.input_lo, data.input_hi);

  const auto predictive_table = [&](const Eigen::VectorXd& theta) {
    const GPFit fit = fit_at_theta(data, theta, base);
    const NaturalPrediction pred = predict_natural(fit, query_scaled);
    CsvTable table;
    table.header = {"x", "mean", "sd"};
    for (int i = 0; i < n_query; ++i) {
      table.rows.push_back({query(i, 0), pred.mean[i], pred.sd[i]});
    }
    return table;
  };
  report.predictive_mle = predictive_table(theta_mle);
  report.predictive_penalized = predictive_table(theta_showcase);
  return report;
}

std::vector<std::string> write_demo(const DemoReport& report,
                                    TestFunction which,
                                    const std::string& out_dir) {
  const std::string prefix = test_function_name(which);
  std::vector<std::string> paths;
  paths.push_back(write_table(out_dir, prefix + "_training_data.csv",
                              report.training_data));
  paths.push_back(write_table(out_dir, prefix + "_profile_loglik.csv",
                              report.profile_loglik));
  paths.push_back(
      write_table(out_dir, prefix + "_lambda_path.csv", report.lambda_path));
  paths.push_back(write_table(out_dir, prefix + "_predictive_mle.csv",
                              report.predictive_mle));
  paths.push_back(write_table(out_dir, prefix + "_predictive_penalized.csv",
                              report.predictive_penalized));
  return paths;
}

// ---------------------------------------------------------------------------
// cv

CvReport run_cv(const Dataset& data, const CvOptions& options) {
  const int n = static_cast<int>(data.n());
  const int K = options.k == 0 ? n : options.k;
  const std::vector<double> grid = grid_or_default(options.grid);

  Rng fold_rng(derive_seed(options.seed, {0}));
  const FoldPartition part = make_folds(n, K, fold_rng);

  CvReport report;
  report.curve = cv_curve(data, part, grid, options.metric, options.family,
                          kNuggetG, options.optim,
                          derive_seed(options.seed, {1}));
  report.lambda_selected = options.use_1se ? report.curve.lambda_1se
                                           : report.curve.lambda_star;

  OptimConfig refit = options.optim;
  refit.seed = derive_seed(options.seed, {2});
  report.final_fit = maximize_penalized(
      data, kNuggetG, spec_at(options.family, report.lambda_selected), refit);
  report.final_sigma2 =
      sigma2_hat(report.final_fit.theta_hat, data, kNuggetG);

  // Long-form curve table: one row per (lambda, fold) cell.
  const int d = static_cast<int>(data.d());
  report.curve_table.header = {"lambda", "fold", "metric_value", "sigma2_hat"};
  for (const std::string& name : theta_headers(d)) {
    report.curve_table.header.push_back(name);
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (int k = 0; k < K; ++k) {
      std::vector<double> row = {grid[j], static_cast<double>(k),
                                 report.curve.per_fold(k, j),
                                 report.curve.per_fold_sigma2(k, j)};
      const Eigen::VectorXd& theta = report.curve.per_fold_theta[k][j];
      for (int p = 0; p < d; ++p) {
        row.push_back(theta.size() == d ? theta[p] : kNaN);
      }
      report.curve_table.rows.push_back(std::move(row));
    }
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["metric"] = metric_kind_name(options.metric);
  summary["family"] = family_name(options.family);
  summary["k"] = K;
  summary["seed"] = options.seed;
  summary["use_1se"] = options.use_1se;
  summary["lambda_star"] = report.curve.lambda_star;
  summary["lambda_1se"] = report.curve.lambda_1se;
  summary["lambda_selected"] = report.lambda_selected;
  summary["grid"] = json_vector(report.curve.grid);
  summary["mean_curve"] = json_vector(report.curve.mean_curve);
  summary["sd"] = json_vector(report.curve.sd);
  summary["se"] = json_vector(report.curve.se);
  json eligible = json::array();
  for (bool e : report.curve.eligible) eligible.push_back(e);
  summary["eligible"] = eligible;
  summary["final_fit"] = {
      {"lambda", report.lambda_selected},
      {"theta_hat", json_vector(report.final_fit.theta_hat)},
      {"sigma2_hat", report.final_sigma2},
      {"objective", report.final_fit.objective},
      {"converged", report.final_fit.converged},
  };
  report.summary_json = summary.dump(2) + "\n";
  return report;
}

std::vector<std::string> write_cv(const CvReport& report,
                                  const std::string& out_dir) {
  std::vector<std::string> paths;
  paths.push_back(write_table(out_dir, "cv_curve.csv", report.curve_table));
  paths.push_back(
      write_text_file(out_dir, "cv_summary.json", report.summary_json));
  return paths;
}

// ---------------------------------------------------------------------------
// sim-study

const char* method_name(Method m) {
  switch (m) {
    case Method::mle: return "MLE";
    case Method::pe: return "PE";
    case Method::md: return "MD";
    case Method::score: return "Score";
    case Method::dpe: return "DPE";
    case Method::dpe_1se: return "DPE-1SE";
    case Method::pmle_star: return "pMLE*";
  }
  return "?";
}

SimStudyReport run_sim_study(const SimStudyOptions& options) {
  switch (options.function) {
    case TestFunction::lim:
    case TestFunction::franke:
    case TestFunction::piston_sim:
    case TestFunction::borehole:
      break;
    default:
      throw DomainError(
          "sim-study expects one of the study functions "
          "(lim, franke, piston-sim, borehole)");
  }
  if (options.reps < 1) throw DomainError("sim-study needs reps >= 1");

  const BenchmarkSpec spec = benchmark_spec(options.function);
  const std::vector<double> grid = grid_or_default(options.grid);
  const int J = static_cast<int>(grid.size());

  SimStudyReport report;
  // Gap accumulators per method across reps.
  std::vector<std::vector<double>> rmse_gaps(kMethodCount);
  std::vector<std::vector<double>> crps_gaps(kMethodCount);

  for (int rep = 0; rep < options.reps; ++rep) {
    const std::uint64_t rs = options.seed + static_cast<std::uint64_t>(rep);

    // Fresh Latin hypercube training and test designs.
    Rng rng_train(derive_seed(rs, {0}));
    Rng rng_test(derive_seed(rs, {1}));
    Rng rng_folds(derive_seed(rs, {2}));
    const Eigen::MatrixXd train_nat = unscale_inputs(
        lhs_design(spec.n_train, spec.d, rng_train), spec.input_lo,
        spec.input_hi);
    const Eigen::MatrixXd test_nat = unscale_inputs(
        lhs_design(spec.n_test, spec.d, rng_test), spec.input_lo,
        spec.input_hi);
    Eigen::VectorXd y_train(spec.n_train), y_test(spec.n_test);
    for (int i = 0; i < spec.n_train; ++i) {
      y_train[i] =
          eval_test_function(options.function, train_nat.row(i).transpose());
    }
    for (int i = 0; i < spec.n_test; ++i) {
      y_test[i] =
          eval_test_function(options.function, test_nat.row(i).transpose());
    }
    const Dataset data =
        make_dataset(train_nat, y_train, spec.input_lo, spec.input_hi);
    const Eigen::MatrixXd test_scaled =
        scale_inputs(test_nat, spec.input_lo, spec.input_hi);

    // One shared cell table; every metric's curve reduces from it.
    const FoldPartition part =
        make_folds(spec.n_train, options.cv_k, rng_folds);
    const CVCellTable cells = cv_cells(data, part, grid,
                                       PenaltyFamily::lasso, kNuggetG,
                                       options.optim, rs);

    // Selected lambda per method (NaN = selection unavailable).
    std::array<double, kMethodCount> selected;
    selected.fill(kNaN);
    selected[static_cast<int>(Method::mle)] = 0.0;
    const auto select = [&](MetricKind metric, Method method, bool use_1se) {
      try {
        const CVCurve curve = curve_from_cells(cells, metric);
        selected[static_cast<int>(method)] =
            use_1se ? curve.lambda_1se : curve.lambda_star;
      } catch (const SelectionError& e) {
        std::cerr << "rep " << rep << ": " << method_name(method)
                  << " selection failed: " << e.what() << "\n";
      }
    };
    select(MetricKind::PE, Method::pe, false);
    select(MetricKind::MD, Method::md, false);
    select(MetricKind::Score, Method::score, false);
    select(MetricKind::DPE, Method::dpe, false);
    select(MetricKind::DPE, Method::dpe_1se, true);

    // Full-data fits by grid index, shared across methods and the oracle.
    std::vector<std::optional<FullFit>> cache(J);
    const auto fit_index = [&](int j) -> const FullFit& {
      if (!cache[j]) {
        cache[j] = full_data_fit(data, PenaltyFamily::lasso, grid[j],
                                 options.optim, derive_seed(rs, {99, static_cast<std::uint64_t>(j)}),
                                 &test_scaled, &y_test);
      }
      return *cache[j];
    };

    // Oracle pMLE*: the grid lambda with the smallest test RMSE.
    int star_index = -1;
    for (int j = 0; j < J; ++j) {
      const FullFit& fit = fit_index(j);
      if (!fit.ok || std::isnan(fit.rmse)) continue;
      if (star_index < 0 || fit.rmse < cache[star_index]->rmse) {
        star_index = j;
      }
    }
    if (star_index >= 0) {
      selected[static_cast<int>(Method::pmle_star)] = grid[star_index];
    }

    const double base_rmse =
        star_index >= 0 ? cache[star_index]->rmse : kNaN;
    const double base_crps =
        star_index >= 0 ? cache[star_index]->crps : kNaN;

    // A custom grid may omit lambda = 0; the MLE then needs its own fit.
    std::optional<FullFit> off_grid_mle;
    for (int m = 0; m < kMethodCount; ++m) {
      MethodRecord record;
      record.rep = rep;
      record.method = static_cast<Method>(m);
      record.lambda = selected[m];
      record.sigma2_hat = kNaN;
      record.rmse = kNaN;
      record.crps = kNaN;
      if (!std::isnan(selected[m])) {
        // Every selection except the MLE's lambda = 0 came off the grid.
        const auto it = std::find(grid.begin(), grid.end(), selected[m]);
        const FullFit* fit = nullptr;
        if (it != grid.end()) {
          fit = &fit_index(static_cast<int>(it - grid.begin()));
        } else if (static_cast<Method>(m) == Method::mle) {
          if (!off_grid_mle) {
            off_grid_mle = full_data_fit(data, PenaltyFamily::lasso, 0.0,
                                         options.optim, derive_seed(rs, {98}),
                                         &test_scaled, &y_test);
          }
          fit = &*off_grid_mle;
        }
        if (fit != nullptr && fit->ok) {
          record.theta_hat = fit->theta_hat;
          record.sigma2_hat = fit->sigma2_hat;
          record.rmse = fit->rmse;
          record.crps = fit->crps;
        }
      }
      rmse_gaps[m].push_back((record.rmse - base_rmse) / base_rmse);
      crps_gaps[m].push_back((record.crps - base_crps) / base_crps);
      report.records.push_back(std::move(record));
    }
  }

  for (int m = 0; m < kMethodCount; ++m) {
    report.median_rmse_gap[m] = nan_median(rmse_gaps[m]);
    report.median_crps_gap[m] = nan_median(crps_gaps[m]);
  }

  // Tables.
  report.records_table.header = {"rep",        "method_id", "lambda",
                                 "sigma2_hat", "rmse",      "crps"};
  for (const std::string& name : theta_headers(spec.d)) {
    report.records_table.header.push_back(name);
  }
  for (const MethodRecord& record : report.records) {
    std::vector<double> row = {static_cast<double>(record.rep),
                               static_cast<double>(record.method),
                               record.lambda,
                               record.sigma2_hat,
                               record.rmse,
                               record.crps};
    for (int p = 0; p < spec.d; ++p) {
      row.push_back(record.theta_hat.size() == spec.d ? record.theta_hat[p]
                                                      : kNaN);
    }
    report.records_table.rows.push_back(std::move(row));
  }

  report.summary_table.header = {"method_id", "median_rmse_gap",
                                 "median_crps_gap"};
  for (int m = 0; m < kMethodCount; ++m) {
    report.summary_table.rows.push_back(
        {static_cast<double>(m), report.median_rmse_gap[m],
         report.median_crps_gap[m]});
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["function"] = test_function_name(options.function);
  summary["reps"] = options.reps;
  summary["seed"] = options.seed;
  summary["k"] = options.cv_k;
  summary["baseline"] = method_name(Method::pmle_star);
  json methods = json::object();
  json gaps = json::object();
  for (int m = 0; m < kMethodCount; ++m) {
    const char* name = method_name(static_cast<Method>(m));
    methods[std::to_string(m)] = name;
    gaps[name] = {{"median_rmse_gap", report.median_rmse_gap[m]},
                  {"median_crps_gap", report.median_crps_gap[m]}};
  }
  summary["methods"] = methods;
  summary["median_gaps"] = gaps;
  report.summary_json = summary.dump(2) + "\n";
  return report;
}

std::vector<std::string> write_sim_study(const SimStudyReport& report,
                                         const std::string& out_dir) {
  std::vector<std::string> paths;
  paths.push_back(
      write_table(out_dir, "sim_records.csv", report.records_table));
  paths.push_back(
      write_table(out_dir, "sim_summary.csv", report.summary_table));
  paths.push_back(
      write_text_file(out_dir, "sim_summary.json", report.summary_json));
  return paths;
}

// ---------------------------------------------------------------------------
// piston

const char* piston_metric_name(PistonMetric m) {
  switch (m) {
    case PistonMetric::pe: return "PE";
    case PistonMetric::dpe: return "DPE";
    case PistonMetric::dpe_1se: return "DPE-1SE";
  }
  return "?";
}

PistonReport run_piston(const PistonOptions& options) {
  if (options.reps < 1) throw DomainError("piston needs reps >= 1");
  const PistonSlapData piston = piston_slap_dataset();
  const Dataset& data = piston.data;
  const int n = static_cast<int>(data.n());
  const int d = static_cast<int>(data.d());
  const std::vector<double> grid = grid_or_default(options.grid);
  const int J = static_cast<int>(grid.size());

  PistonReport report;

  // Optional held-out test table in natural units.
  Eigen::MatrixXd test_scaled;
  Eigen::VectorXd y_test;
  if (!options.test_csv.empty()) {
    const ParsedDataset parsed =
        dataset_from_table(read_csv_file(options.test_csv));
    if (parsed.inputs.cols() != d) {
      throw CsvFormatError("piston test CSV must have 6 input columns");
    }
    test_scaled = scale_inputs(parsed.inputs, data.input_lo, data.input_hi);
    y_test = parsed.responses;
    report.have_test_set = true;
  }
  const Eigen::MatrixXd* test_ptr =
      report.have_test_set ? &test_scaled : nullptr;
  const Eigen::VectorXd* y_ptr = report.have_test_set ? &y_test : nullptr;

  // Full-data fits by grid index (the data never changes, so the cache is
  // shared by every scenario and repetition).
  std::vector<std::optional<FullFit>> cache(J);
  const auto fit_index = [&](int j) -> const FullFit& {
    if (!cache[j]) {
      cache[j] = full_data_fit(
          data, PenaltyFamily::lasso, grid[j], options.optim,
          derive_seed(options.seed, {99, static_cast<std::uint64_t>(j)}),
          test_ptr, y_ptr);
    }
    return *cache[j];
  };
  const auto index_of = [&](double lambda) {
    const auto it = std::find(grid.begin(), grid.end(), lambda);
    return it == grid.end() ? -1 : static_cast<int>(it - grid.begin());
  };

  // MLE baseline (lambda = 0; appended to the cache logic when the custom
  // grid omits zero).
  FullFit mle;
  if (const int j0 = index_of(0.0); j0 >= 0) {
    mle = fit_index(j0);
  } else {
    mle = full_data_fit(data, PenaltyFamily::lasso, 0.0, options.optim,
                        derive_seed(options.seed, {98}), test_ptr, y_ptr);
  }
  if (!mle.ok) {
    throw OptimizationFailedError("piston MLE fit failed", {});
  }

  const auto scenario_from = [&](const std::string& name, double lambda,
                                 const FullFit& fit) {
    PistonScenario s;
    s.name = name;
    s.lambda = lambda;
    s.theta_hat = fit.theta_hat;
    s.sigma2_hat = fit.sigma2_hat;
    s.rmse = fit.rmse;
    s.crps = fit.crps;
    return s;
  };
  report.scenarios.push_back(scenario_from("MLE", 0.0, mle));

  // LOOCV with PE.
  Rng loocv_rng(derive_seed(options.seed, {1}));
  const FoldPartition loocv = make_folds(n, n, loocv_rng);
  const CVCellTable loocv_cells =
      cv_cells(data, loocv, grid, PenaltyFamily::lasso, kNuggetG,
               options.optim, derive_seed(options.seed, {1}));
  const CVCurve loocv_curve = curve_from_cells(loocv_cells, MetricKind::PE);
  {
    const int j = index_of(loocv_curve.lambda_star);
    report.scenarios.push_back(
        scenario_from("LOOCV-PE", loocv_curve.lambda_star, fit_index(j)));
  }

  // Repeated randomized 4-fold CV.
  const auto theta_equals_mle = [&](const Eigen::VectorXd& theta) {
    if (theta.size() != mle.theta_hat.size()) return false;
    return (theta - mle.theta_hat).cwiseAbs().maxCoeff() <= 1e-6;
  };

  report.selections_table.header = {"rep",  "metric_id", "lambda",
                                    "equal_mle", "rmse", "crps"};
  std::array<std::map<double, int>, kPistonMetricCount> lambda_counts;
  for (int m = 0; m < kPistonMetricCount; ++m) {
    report.tallies[m].metric = static_cast<PistonMetric>(m);
  }

  for (int rep = 0; rep < options.reps; ++rep) {
    const std::uint64_t rs = options.seed + static_cast<std::uint64_t>(rep);
    Rng fold_rng(derive_seed(rs, {2}));
    const FoldPartition part = make_folds(n, 4, fold_rng);
    const CVCellTable cells = cv_cells(data, part, grid,
                                       PenaltyFamily::lasso, kNuggetG,
                                       options.optim, rs);
    std::array<double, kPistonMetricCount> picks;
    picks.fill(kNaN);
    try {
      picks[static_cast<int>(PistonMetric::pe)] =
          curve_from_cells(cells, MetricKind::PE).lambda_star;
    } catch (const SelectionError&) {
    }
    try {
      const CVCurve dpe = curve_from_cells(cells, MetricKind::DPE);
      picks[static_cast<int>(PistonMetric::dpe)] = dpe.lambda_star;
      picks[static_cast<int>(PistonMetric::dpe_1se)] = dpe.lambda_1se;
    } catch (const SelectionError&) {
    }

    for (int m = 0; m < kPistonMetricCount; ++m) {
      const double lambda = picks[m];
      double equal = kNaN, fit_rmse = kNaN, fit_crps = kNaN;
      if (!std::isnan(lambda)) {
        ++lambda_counts[m][lambda];
        const FullFit& fit = fit_index(index_of(lambda));
        if (fit.ok) {
          const bool eq = theta_equals_mle(fit.theta_hat);
          equal = eq ? 1.0 : 0.0;
          fit_rmse = fit.rmse;
          fit_crps = fit.crps;
          PistonTally& tally = report.tallies[m];
          if (eq) {
            ++tally.n_equal_mle;
          } else {
            ++tally.n_different;
            if (report.have_test_set && !std::isnan(fit.rmse)) {
              if (fit.rmse < mle.rmse) {
                ++tally.n_rmse_less;
              } else {
                ++tally.n_rmse_greater;
              }
            }
          }
        }
      }
      report.selections_table.rows.push_back(
          {static_cast<double>(rep), static_cast<double>(m), lambda, equal,
           fit_rmse, fit_crps});
    }
  }

  // Modal selected lambda per metric becomes a reported scenario.
  for (int m = 0; m < kPistonMetricCount; ++m) {
    if (lambda_counts[m].empty()) continue;
    double modal = 0.0;
    int best = -1;
    for (const auto& [lambda, count] : lambda_counts[m]) {
      if (count > best) {
        best = count;
        modal = lambda;
      }
    }
    const std::string name =
        std::string("4-fold ") + piston_metric_name(static_cast<PistonMetric>(m)) +
        " (modal)";
    report.scenarios.push_back(
        scenario_from(name, modal, fit_index(index_of(modal))));
  }

  report.tally_table.header = {"metric_id", "n_equal_mle", "n_different",
                               "n_rmse_less", "n_rmse_greater"};
  for (int m = 0; m < kPistonMetricCount; ++m) {
    const PistonTally& tally = report.tallies[m];
    report.tally_table.rows.push_back(
        {static_cast<double>(m), static_cast<double>(tally.n_equal_mle),
         static_cast<double>(tally.n_different),
         report.have_test_set ? static_cast<double>(tally.n_rmse_less) : kNaN,
         report.have_test_set ? static_cast<double>(tally.n_rmse_greater)
                              : kNaN});
  }

  report.parameters_table.header = {"scenario_id", "lambda", "sigma2_hat",
                                    "rmse", "crps"};
  for (const std::string& name : theta_headers(d)) {
    report.parameters_table.header.push_back(name);
  }
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const PistonScenario& scenario = report.scenarios[s];
    std::vector<double> row = {static_cast<double>(s), scenario.lambda,
                               scenario.sigma2_hat, scenario.rmse,
                               scenario.crps};
    for (int p = 0; p < d; ++p) row.push_back(scenario.theta_hat[p]);
    report.parameters_table.rows.push_back(std::move(row));
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["reps"] = options.reps;
  summary["seed"] = options.seed;
  summary["have_test_set"] = report.have_test_set;
  summary["equal_rule"] =
      "theta_hat within 1e-6 per coordinate of the MLE theta_hat";
  json scenarios = json::array();
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const PistonScenario& scenario = report.scenarios[s];
    scenarios.push_back({{"scenario_id", s},
                         {"name", scenario.name},
                         {"lambda", scenario.lambda},
                         {"sigma2_hat", scenario.sigma2_hat},
                         {"theta_hat", json_vector(scenario.theta_hat)}});
  }
  summary["scenarios"] = scenarios;
  json tallies = json::object();
  for (int m = 0; m < kPistonMetricCount; ++m) {
    const PistonTally& tally = report.tallies[m];
    json entry = {{"equal_mle", tally.n_equal_mle},
                  {"different", tally.n_different}};
    if (report.have_test_set) {
      entry["rmse_less"] = tally.n_rmse_less;
      entry["rmse_greater"] = tally.n_rmse_greater;
    }
    tallies[piston_metric_name(static_cast<PistonMetric>(m))] = entry;
  }
  summary["tallies"] = tallies;
  report.summary_json = summary.dump(2) + "\n";
  return report;
}

std::vector<std::string> write_piston(const PistonReport& report,
                                      const std::string& out_dir) {
  std::vector<std::string> paths;
  paths.push_back(write_table(out_dir, "piston_selections.csv",
                              report.selections_table));
  paths.push_back(
      write_table(out_dir, "piston_tally.csv", report.tally_table));
  paths.push_back(write_table(out_dir, "piston_parameters.csv",
                              report.parameters_table));
  paths.push_back(
      write_text_file(out_dir, "piston_summary.json", report.summary_json));
  return paths;
}

// ---------------------------------------------------------------------------
// shared plumbing

std::string write_text_file(const std::string& out_dir,
                            const std::string& name,
                            const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory \"" + out_dir +
                  "\": " + ec.message());
  }
  const std::string path = (fs::path(out_dir) / name).string();
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open \"" + path + "\" for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("write to \"" + path + "\" failed");
  }
  return path;
}

std::string write_table(const std::string& out_dir, const std::string& name,
                        const CsvTable& table) {
  std::ostringstream buffer;
  write_csv(buffer, table);
  return write_text_file(out_dir, name, buffer.str());
}

Dataset dataset_from_csv_file(const std::string& path) {
  const ParsedDataset parsed = dataset_from_table(read_csv_file(path));
  if (parsed.inputs.rows() == 0) {
    throw EmptyDataError("dataset \"" + path + "\" has no rows");
  }
  const Eigen::VectorXd lo = parsed.inputs.colwise().minCoeff();
  const Eigen::VectorXd hi = parsed.inputs.colwise().maxCoeff();
  return make_dataset(parsed.inputs, parsed.responses, lo, hi);
}

}  // namespace gppen::studies
