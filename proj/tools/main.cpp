// gp-penalty: command-line harness around the penalized Gaussian-process
// library. Subcommands:
//
//   demo       profile likelihoods, a lambda path, and predictive curves
//              for the sine or forrester demonstration
//   cv         cross-validated lambda selection on a demo function or a
//              user CSV, with a full-data refit at the selection
//   sim-study  repeated fresh-design comparison of the tuning metrics
//              against the oracle pMLE* baseline
//   piston     the piston slap-noise case study
//
// Exit codes: 0 success, 1 usage or computation error, 2 file I/O failure,
// 3 malformed CSV, 4 no eligible lambda to select.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gppenalty/errors.hpp"
#include "studies.hpp"

namespace {

using namespace gppen;
using namespace gppen::studies;

// "default" (or empty) keeps the engines on default_lambda_grid();
// otherwise a comma-separated list of numbers.
std::vector<double> parse_grid(const std::string& text) {
  if (text.empty() || text == "default") return {};
  std::vector<double> grid;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size()) {
      throw DomainError("--grid: \"" + token + "\" is not a number");
    }
    grid.push_back(value);
  }
  return grid;
}

MetricKind parse_metric(const std::string& name) {
  if (name == "pe") return MetricKind::PE;
  if (name == "md") return MetricKind::MD;
  if (name == "score") return MetricKind::Score;
  if (name == "dpe") return MetricKind::DPE;
  throw DomainError("--metric expects pe, md, score, or dpe");
}

void print_paths(const std::vector<std::string>& paths) {
  for (const std::string& path : paths) std::cout << "wrote " << path << "\n";
}

int cmd_demo(const std::string& function, const std::string& out_dir) {
  const TestFunction which = parse_test_function(function);
  const DemoReport report = run_demo(which);
  print_paths(write_demo(report, which, out_dir));
  return 0;
}

int cmd_cv(const std::string& function, const std::string& data_path,
           const CvOptions& base, const std::string& metric,
           const std::string& grid, const std::string& out_dir) {
  CvOptions options = base;
  options.metric = parse_metric(metric);
  options.grid = parse_grid(grid);

  Dataset data;
  if (!data_path.empty()) {
    data = dataset_from_csv_file(data_path);
    options.optim = study_optim_config();
  } else if (!function.empty()) {
    data = demo_dataset(parse_test_function(function));
    options.optim = demo_optim_config();
  } else {
    throw DomainError("cv needs --function or a dataset CSV");
  }

  const CvReport report = run_cv(data, options);
  std::cout << "lambda_star " << format_double(report.curve.lambda_star)
            << "\n";
  std::cout << "lambda_1se " << format_double(report.curve.lambda_1se)
            << "\n";
  std::cout << "selected_lambda " << format_double(report.lambda_selected)
            << "\n";
  print_paths(write_cv(report, out_dir));
  return 0;
}

int cmd_sim_study(const std::string& function, int reps, std::uint64_t seed,
                  int k, const std::string& grid,
                  const std::string& out_dir) {
  SimStudyOptions options;
  options.function = parse_test_function(function);
  options.reps = reps;
  options.seed = seed;
  options.cv_k = k;
  options.grid = parse_grid(grid);

  const SimStudyReport report = run_sim_study(options);
  for (int m = 0; m < kMethodCount; ++m) {
    std::cout << "median_rmse_gap " << method_name(static_cast<Method>(m))
              << " " << format_double(report.median_rmse_gap[m]) << "\n";
  }
  print_paths(write_sim_study(report, out_dir));
  return 0;
}

int cmd_piston(int reps, std::uint64_t seed, const std::string& grid,
               const std::string& test_csv, const std::string& out_dir) {
  PistonOptions options;
  options.reps = reps;
  options.seed = seed;
  options.grid = parse_grid(grid);
  options.test_csv = test_csv;

  const PistonReport report = run_piston(options);
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const PistonScenario& scenario = report.scenarios[s];
    std::cout << "scenario " << s << " [" << scenario.name << "] lambda "
              << format_double(scenario.lambda) << " sigma2 "
              << format_double(scenario.sigma2_hat) << "\n";
  }
  for (int m = 0; m < kPistonMetricCount; ++m) {
    const PistonTally& tally = report.tallies[m];
    std::cout << "tally " << piston_metric_name(static_cast<PistonMetric>(m))
              << " equal_mle " << tally.n_equal_mle << " different "
              << tally.n_different << "\n";
  }
  print_paths(write_piston(report, out_dir));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized Gaussian-process regression experiments"};
  app.require_subcommand(1);

  // demo -----------------------------------------------------------------
  std::string demo_function = "sine";
  std::string demo_out = "gp-penalty-out";
  CLI::App* demo = app.add_subcommand(
      "demo", "Profile likelihoods, lambda path, predictive curves");
  demo->add_option("--function", demo_function, "sine or forrester")
      ->check(CLI::IsMember({"sine", "forrester"}));
  demo->add_option("--out", demo_out, "output directory");

  // cv -------------------------------------------------------------------
  std::string cv_function;
  std::string cv_data;
  std::string cv_metric = "dpe";
  std::string cv_grid = "default";
  std::string cv_out = "gp-penalty-out";
  CvOptions cv_options;
  CLI::App* cv = app.add_subcommand(
      "cv", "Cross-validated lambda selection plus full-data refit");
  cv->add_option("--function", cv_function, "sine or forrester")
      ->check(CLI::IsMember({"sine", "forrester"}));
  cv->add_option("--data,data", cv_data, "dataset CSV (header x1..xd,y)");
  cv->add_option("--metric", cv_metric, "pe, md, score, or dpe")
      ->check(CLI::IsMember({"pe", "md", "score", "dpe"}));
  cv->add_option("--k", cv_options.k, "fold count; 0 = leave-one-out")
      ->check(CLI::NonNegativeNumber);
  cv->add_option("--seed", cv_options.seed, "RNG seed");
  cv->add_option("--grid", cv_grid, "comma-separated lambdas or \"default\"");
  cv->add_flag("--use-1se", cv_options.use_1se,
               "refit at lambda_1se instead of lambda_star");
  cv->add_option("--out", cv_out, "output directory");

  // sim-study ------------------------------------------------------------
  std::string sim_function = "lim";
  std::string sim_grid = "default";
  std::string sim_out = "gp-penalty-out";
  int sim_reps = 20;
  std::uint64_t sim_seed = 0;
  int sim_k = 5;
  CLI::App* sim = app.add_subcommand(
      "sim-study", "Repeated tuning-method comparison on a study function");
  sim->add_option("--function", sim_function,
                  "lim, franke, piston-sim, or borehole");
  sim->add_option("--reps", sim_reps, "number of replications")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "base seed; rep r uses seed + r");
  sim->add_option("--k", sim_k, "fold count per replication")
      ->check(CLI::PositiveNumber);
  sim->add_option("--grid", sim_grid, "comma-separated lambdas or \"default\"");
  sim->add_option("--out", sim_out, "output directory");

  // piston ---------------------------------------------------------------
  std::string piston_grid = "default";
  std::string piston_test;
  std::string piston_out = "gp-penalty-out";
  int piston_reps = 100;
  std::uint64_t piston_seed = 0;
  CLI::App* piston = app.add_subcommand(
      "piston", "Piston slap-noise case study");
  piston->add_option("--reps", piston_reps, "randomized 4-fold repetitions")
      ->check(CLI::PositiveNumber);
  piston->add_option("--seed", piston_seed, "base seed; rep r uses seed + r");
  piston->add_option("--grid", piston_grid,
                     "comma-separated lambdas or \"default\"");
  piston->add_option("--test", piston_test,
                     "held-out test CSV (header x1..x6,y)");
  piston->add_option("--out", piston_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (demo->parsed()) return cmd_demo(demo_function, demo_out);
    if (cv->parsed()) {
      return cmd_cv(cv_function, cv_data, cv_options, cv_metric, cv_grid,
                    cv_out);
    }
    if (sim->parsed()) {
      return cmd_sim_study(sim_function, sim_reps, sim_seed, sim_k, sim_grid,
                           sim_out);
    }
    if (piston->parsed()) {
      return cmd_piston(piston_reps, piston_seed, piston_grid, piston_test,
                        piston_out);
    }
  } catch (const CsvFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SelectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
