#pragma once

#include <Eigen/Core>

namespace gppen {

// Training data in the model's internal frame: inputs scaled to the unit
// hypercube, responses centered at zero (and optionally standardized). The
// pre-scaling bounds, the pre-centering mean, and the response scale are
// retained so predictions can be mapped back to natural units via
// y_natural = response_scale * y + response_mean.
struct Dataset {
  Eigen::MatrixXd inputs;       // n x d, entries in [0, 1]
  Eigen::VectorXd responses;    // length n, centered
  double response_mean = 0.0;   // mean removed from the raw responses
  double response_scale = 1.0;  // divisor applied after centering (1 = none)
  Eigen::VectorXd input_lo;     // length d, natural-unit lower bounds
  Eigen::VectorXd input_hi;     // length d, natural-unit upper bounds

  Eigen::Index n() const { return inputs.rows(); }
  Eigen::Index d() const { return inputs.cols(); }
};

// Map natural-unit inputs onto [0, 1]^d by the affine transform per column.
// Entries outside [lo, hi] are allowed (test points may extrapolate) and
// simply land outside the unit interval.
//
// Throws InvalidDesignError when lo[p] == hi[p] for some dimension,
// ShapeError when the bound vectors do not match the column count.
Eigen::MatrixXd scale_inputs(const Eigen::MatrixXd& raw,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi);

// Inverse of scale_inputs (unit hypercube back to natural units).
Eigen::MatrixXd unscale_inputs(const Eigen::MatrixXd& scaled,
                               const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi);

// Subtract the mean; the removed mean is written to *mean_out.
// Throws EmptyDataError when the vector has no entries.
Eigen::VectorXd center_responses(const Eigen::VectorXd& raw, double* mean_out);

// Assemble a Dataset from natural-unit inputs and responses.
// Throws ShapeError when row counts disagree, and propagates the errors of
// scale_inputs / center_responses.
Dataset make_dataset(const Eigen::MatrixXd& raw_inputs,
                     const Eigen::VectorXd& raw_responses,
                     const Eigen::VectorXd& input_lo,
                     const Eigen::VectorXd& input_hi);

}  // namespace gppen
