#pragma once

#include <string>

#include <Eigen/Core>

#include "gppenalty/dataset.hpp"

namespace gppen {

// Closed-form simulators used by the demonstrations and the simulation
// study: two 1-d demo curves plus four classic multivariate benchmarks.
enum class TestFunction { sine, forrester, lim, franke, piston_sim, borehole };

// Experiment settings for one function: dimension, natural input ranges,
// and the study's train/test sizes. The two demo functions use fixed
// equispaced training designs and carry n_test = 0.
struct BenchmarkSpec {
  TestFunction name = TestFunction::sine;
  int d = 0;
  Eigen::VectorXd input_lo;  // natural-unit range per dimension
  Eigen::VectorXd input_hi;
  int n_train = 0;
  int n_test = 0;
};

// Evaluate a test function at one point in natural units. Out-of-range
// points evaluate anyway (the declared ranges are advisory).
// Throws ShapeError when x_raw has the wrong length, NumericError when the
// piston simulator's discriminant goes negative.
double eval_test_function(TestFunction f, const Eigen::VectorXd& x_raw);

// Settings table for each function (dimension, ranges, train/test sizes).
BenchmarkSpec benchmark_spec(TestFunction f);

// Name <-> enum mapping for the command line.
// parse_test_function throws DomainError for an unrecognized name.
TestFunction parse_test_function(const std::string& name);
std::string test_function_name(TestFunction f);

// Fixed training set for the demo functions: n_train points equally spaced
// across the natural range, endpoints included, responses centered.
// Throws DomainError for the multivariate study functions.
Dataset demo_dataset(TestFunction f);

}  // namespace gppen
