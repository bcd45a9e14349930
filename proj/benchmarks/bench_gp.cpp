// Microbenchmarks for the smallest units the studies hammer: kernel
// assembly, the profile likelihood and its gradient, posterior prediction,
// and one full cross-validation cell (a multistart fit).

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "gppenalty/cv.hpp"
#include "gppenalty/dataset.hpp"
#include "gppenalty/gp.hpp"
#include "gppenalty/kernel.hpp"
#include "gppenalty/optimize.hpp"
#include "gppenalty/penalty.hpp"
#include "gppenalty/rng.hpp"
#include "gppenalty/testfuncs.hpp"

namespace {

using namespace gppen;

// Deterministic n x d design and response for a given size.
struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd theta;
};

Instance make_instance(int n, int d) {
  Rng rng(derive_seed(1234, {static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(d)}));
  Instance inst;
  inst.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < d; ++p) inst.X(i, p) = rng.uniform01();
  }
  inst.y.resize(n);
  for (int i = 0; i < n; ++i) inst.y[i] = rng.normal();
  inst.theta = Eigen::VectorXd::Constant(d, 2.0);
  return inst;
}

void BM_KernelMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernel_matrix(inst.X, inst.X, inst.theta, 1e-5, true));
  }
}
BENCHMARK(BM_KernelMatrix)->Arg(16)->Arg(64)->Arg(256);

void BM_ProfileLoglik(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        profile_loglik(inst.theta, inst.X, inst.y, 1e-5));
  }
}
BENCHMARK(BM_ProfileLoglik)->Arg(16)->Arg(64)->Arg(256);

void BM_GradProfileLoglik(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grad_profile_loglik(inst.theta, inst.X, inst.y, 1e-5));
  }
}
BENCHMARK(BM_GradProfileLoglik)->Arg(16)->Arg(64)->Arg(256);

void BM_Predict(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, 2);
  Dataset data;
  data.inputs = inst.X;
  data.responses = inst.y;
  data.input_lo = Eigen::VectorXd::Zero(2);
  data.input_hi = Eigen::VectorXd::Ones(2);
  KernelConfig config;
  config.theta = inst.theta;
  const GPFit fit = gp_fit(data, config);
  const Instance query = make_instance(32, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(fit, query.X));
  }
}
BENCHMARK(BM_Predict)->Arg(16)->Arg(64)->Arg(256);

// One cross-validation cell: a 10-start penalized fit on a training fold
// of the forrester demo data.
void BM_CvCellFit(benchmark::State& state) {
  const Dataset data = demo_dataset(TestFunction::forrester);
  const Eigen::MatrixXd X = data.inputs.topRows(7);
  const Eigen::VectorXd y = data.responses.head(7);
  PenaltySpec spec;
  spec.family = PenaltyFamily::lasso;
  spec.lambda = 0.02;
  OptimConfig config;
  config.theta_hi = 1e2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_penalized(X, y, 1e-5, spec, config));
  }
}
BENCHMARK(BM_CvCellFit);

}  // namespace

BENCHMARK_MAIN();
