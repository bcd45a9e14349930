#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gppen {

// Base class for every error thrown by the library. Catching gppen::Error is
// sufficient to intercept anything the library can raise.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experimental design is unusable (e.g. a degenerate input dimension whose
// lower and upper bounds coincide).
class InvalidDesignError : public Error {
 public:
  using Error::Error;
};

// Containers whose dimensions do not line up (vector lengths, matrix shapes).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside its mathematical domain (nonpositive lengthscale,
// negative penalty weight, negative predictive standard deviation, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An operation that needs at least one observation received none.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

// A matrix factorization failed. Carries the lengthscales that produced the
// failing matrix and the pivot index at which the factorization broke down.
class NumericError : public Error {
 public:
  NumericError(const std::string& msg, std::vector<double> theta, int pivot)
      : Error(msg), theta_(std::move(theta)), pivot_(pivot) {}

  const std::vector<double>& theta() const { return theta_; }
  int pivot() const { return pivot_; }

 private:
  std::vector<double> theta_;
  int pivot_;
};

// Every multistart of the optimizer failed. Carries one diagnostic line per
// start so the caller can see what happened to each.
class OptimizationFailedError : public Error {
 public:
  OptimizationFailedError(const std::string& msg,
                          std::vector<std::string> start_diagnostics)
      : Error(msg), start_diagnostics_(std::move(start_diagnostics)) {}

  const std::vector<std::string>& start_diagnostics() const {
    return start_diagnostics_;
  }

 private:
  std::vector<std::string> start_diagnostics_;
};

// Model selection could not produce a result (e.g. every candidate column of
// a cross-validation curve was disqualified).
class SelectionError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A CSV stream did not have the expected structure (ragged rows, a field
// that is not a number, a header that does not match the schema).
class CsvFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace gppen
