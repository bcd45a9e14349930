#include "gppenalty/dataset.hpp"

#include <string>

#include "gppenalty/errors.hpp"

namespace gppen {

Eigen::MatrixXd scale_inputs(const Eigen::MatrixXd& raw,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  const Eigen::Index d = raw.cols();
  if (lo.size() != d || hi.size() != d) {
    throw ShapeError("scale_inputs: bounds have length " +
                     std::to_string(lo.size()) + "/" +
                     std::to_string(hi.size()) + " but inputs have " +
                     std::to_string(d) + " columns");
  }
  for (Eigen::Index p = 0; p < d; ++p) {
    if (lo[p] == hi[p]) {
      throw InvalidDesignError("scale_inputs: dimension " + std::to_string(p) +
                               " is degenerate (lo == hi == " +
                               std::to_string(lo[p]) + ")");
    }
  }
  Eigen::MatrixXd out(raw.rows(), d);
  for (Eigen::Index p = 0; p < d; ++p) {
    out.col(p) = (raw.col(p).array() - lo[p]) / (hi[p] - lo[p]);
  }
  return out;
}

Eigen::MatrixXd unscale_inputs(const Eigen::MatrixXd& scaled,
                               const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi) {
  const Eigen::Index d = scaled.cols();
  if (lo.size() != d || hi.size() != d) {
    throw ShapeError("unscale_inputs: bounds length does not match columns");
  }
  Eigen::MatrixXd out(scaled.rows(), d);
  for (Eigen::Index p = 0; p < d; ++p) {
    out.col(p) = lo[p] + (hi[p] - lo[p]) * scaled.col(p).array();
  }
  return out;
}

Eigen::VectorXd center_responses(const Eigen::VectorXd& raw, double* mean_out) {
  if (raw.size() == 0) {
    throw EmptyDataError("center_responses: no responses to center");
  }
  const double m = raw.mean();
  if (mean_out != nullptr) *mean_out = m;
  return raw.array() - m;
}

Dataset make_dataset(const Eigen::MatrixXd& raw_inputs,
                     const Eigen::VectorXd& raw_responses,
                     const Eigen::VectorXd& input_lo,
                     const Eigen::VectorXd& input_hi) {
  if (raw_inputs.rows() != raw_responses.size()) {
    throw ShapeError("make_dataset: " + std::to_string(raw_inputs.rows()) +
                     " input rows vs " + std::to_string(raw_responses.size()) +
                     " responses");
  }
  Dataset data;
  data.inputs = scale_inputs(raw_inputs, input_lo, input_hi);
  data.responses = center_responses(raw_responses, &data.response_mean);
  data.input_lo = input_lo;
  data.input_hi = input_hi;
  return data;
}

}  // namespace gppen
