#include "gppenalty/testfuncs.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gppenalty/errors.hpp"

namespace gppen {

namespace {

void check_dim(const Eigen::VectorXd& x, int d, const char* name) {
  if (x.size() != d) {
    throw ShapeError(std::string(name) + " expects " + std::to_string(d) +
                     " inputs, got " + std::to_string(x.size()));
  }
}

double eval_lim(const Eigen::VectorXd& x) {
  check_dim(x, 2, "lim");
  return ((30.0 + 5.0 * x[0] * std::sin(5.0 * x[0])) *
              (4.0 + std::exp(-5.0 * x[1])) -
          100.0) /
         6.0;
}

double eval_franke(const Eigen::VectorXd& x) {
  check_dim(x, 2, "franke");
  const double a = 9.0 * x[0];
  const double b = 9.0 * x[1];
  return 0.75 * std::exp(-(a - 2.0) * (a - 2.0) / 4.0 -
                         (b - 2.0) * (b - 2.0) / 4.0) +
         0.75 * std::exp(-(a + 1.0) * (a + 1.0) / 49.0 - (b + 1.0) / 10.0) +
         0.5 * std::exp(-(a - 7.0) * (a - 7.0) / 4.0 -
                        (b - 3.0) * (b - 3.0) / 4.0) -
         0.2 * std::exp(-(a - 4.0) * (a - 4.0) - (b - 7.0) * (b - 7.0));
}

double eval_piston_sim(const Eigen::VectorXd& x) {
  check_dim(x, 7, "piston_sim");
  const double M = x[0], S = x[1], V0 = x[2], k = x[3], P0 = x[4], Ta = x[5],
               T0 = x[6];
  const double A = P0 * S + 19.62 * M - k * V0 / S;
  const double disc = A * A + 4.0 * k * (P0 * V0 / T0) * Ta;
  if (disc < 0.0) {
    throw NumericError("piston_sim: negative discriminant " +
                           std::to_string(disc),
                       std::vector<double>(x.data(), x.data() + x.size()), -1);
  }
  const double V = S / (2.0 * k) * (std::sqrt(disc) - A);
  return 2.0 * std::numbers::pi *
         std::sqrt(M / (k + S * S * (P0 * V0 / T0) * Ta / (V * V)));
}

double eval_borehole(const Eigen::VectorXd& x) {
  check_dim(x, 8, "borehole");
  const double rw = x[0], r = x[1], Tu = x[2], Hu = x[3], Tl = x[4], Hl = x[5],
               L = x[6], Kw = x[7];
  const double lograt = std::log(r / rw);
  // The T_u/T_l term sits outside the parenthesized product, following the
  // source text of the study this reproduces (the classic form nests it
  // inside the parentheses).
  return 2.0 * std::numbers::pi * Tu * (Hu - Hl) /
         (lograt * (1.0 + 2.0 * L * Tu / (lograt * rw * rw * Kw)) + Tu / Tl);
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

double eval_test_function(TestFunction f, const Eigen::VectorXd& x_raw) {
  switch (f) {
    case TestFunction::sine:
      check_dim(x_raw, 1, "sine");
      return std::sin(x_raw[0]);
    case TestFunction::forrester: {
      check_dim(x_raw, 1, "forrester");
      const double x = x_raw[0];
      const double t = 6.0 * x - 2.0;
      return t * t * std::sin(12.0 * x - 4.0);
    }
    case TestFunction::lim:
      return eval_lim(x_raw);
    case TestFunction::franke:
      return eval_franke(x_raw);
    case TestFunction::piston_sim:
      return eval_piston_sim(x_raw);
    case TestFunction::borehole:
      return eval_borehole(x_raw);
  }
  throw DomainError("eval_test_function: unknown function");
}

BenchmarkSpec benchmark_spec(TestFunction f) {
  BenchmarkSpec spec;
  spec.name = f;
  switch (f) {
    case TestFunction::sine:
      spec.d = 1;
      spec.input_lo = Eigen::VectorXd::Constant(1, 0.0);
      spec.input_hi = Eigen::VectorXd::Constant(1, 10.0);
      spec.n_train = 6;
      spec.n_test = 0;
      return spec;
    case TestFunction::forrester:
      spec.d = 1;
      spec.input_lo = Eigen::VectorXd::Constant(1, 0.0);
      spec.input_hi = Eigen::VectorXd::Constant(1, 1.25);
      spec.n_train = 8;
      spec.n_test = 0;
      return spec;
    case TestFunction::lim:
      spec.d = 2;
      spec.input_lo = vec2(0.0, 0.0);
      spec.input_hi = vec2(1.0, 1.0);
      spec.n_train = 10;
      spec.n_test = 200;
      return spec;
    case TestFunction::franke:
      spec.d = 2;
      spec.input_lo = vec2(0.0, 0.0);
      spec.input_hi = vec2(1.0, 1.0);
      spec.n_train = 10;
      spec.n_test = 200;
      return spec;
    case TestFunction::piston_sim: {
      spec.d = 7;
      spec.input_lo.resize(7);
      spec.input_hi.resize(7);
      spec.input_lo << 30.0, 0.005, 0.002, 1000.0, 90000.0, 290.0, 340.0;
      spec.input_hi << 60.0, 0.020, 0.010, 5000.0, 110000.0, 296.0, 360.0;
      spec.n_train = 15;
      spec.n_test = 700;
      return spec;
    }
    case TestFunction::borehole: {
      spec.d = 8;
      spec.input_lo.resize(8);
      spec.input_hi.resize(8);
      // First range is typeset "r_2" in the source text; the formula uses
      // r_w, so the range is applied to r_w.
      spec.input_lo << 0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0,
          9855.0;
      spec.input_hi << 0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0,
          12045.0;
      spec.n_train = 15;
      spec.n_test = 800;
      return spec;
    }
  }
  throw DomainError("benchmark_spec: unknown function");
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "sine") return TestFunction::sine;
  if (name == "forrester") return TestFunction::forrester;
  if (name == "lim") return TestFunction::lim;
  if (name == "franke") return TestFunction::franke;
  if (name == "piston-sim" || name == "piston_sim") {
    return TestFunction::piston_sim;
  }
  if (name == "borehole") return TestFunction::borehole;
  throw DomainError("unknown test function \"" + name + "\"");
}

std::string test_function_name(TestFunction f) {
  switch (f) {
    case TestFunction::sine: return "sine";
    case TestFunction::forrester: return "forrester";
    case TestFunction::lim: return "lim";
    case TestFunction::franke: return "franke";
    case TestFunction::piston_sim: return "piston-sim";
    case TestFunction::borehole: return "borehole";
  }
  throw DomainError("test_function_name: unknown function");
}

Dataset demo_dataset(TestFunction f) {
  if (f != TestFunction::sine && f != TestFunction::forrester) {
    throw DomainError("demo_dataset: only the sine and forrester demos use "
                      "fixed equispaced designs");
  }
  const BenchmarkSpec spec = benchmark_spec(f);
  const int n = spec.n_train;
  Eigen::MatrixXd raw(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    raw(i, 0) = spec.input_lo[0] +
                (spec.input_hi[0] - spec.input_lo[0]) * i / (n - 1.0);
    y[i] = eval_test_function(f, raw.row(i).transpose());
  }
  return make_dataset(raw, y, spec.input_lo, spec.input_hi);
}

}  // namespace gppen
