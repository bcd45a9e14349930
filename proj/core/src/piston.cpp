#include "gppenalty/piston.hpp"

#include <cmath>

namespace gppen {

namespace {

// Rows are (cylinder liner, peak-pressure location, skirt length,
// skirt profile, skirt ovality, pin offset, slap noise).
constexpr int kRuns = 12;
constexpr int kInputs = 6;
constexpr double kRows[kRuns][kInputs + 1] = {
    {71.0, 16.8, 21.0, 2.0, 1.0, 0.98, 56.75},
    {15.0, 15.6, 21.8, 1.0, 2.0, 1.30, 57.65},
    {29.0, 14.4, 25.0, 2.0, 1.0, 1.14, 53.97},
    {85.0, 14.4, 21.8, 2.0, 3.0, 0.66, 58.77},
    {29.0, 12.0, 21.0, 3.0, 2.0, 0.82, 56.34},
    {57.0, 12.0, 23.4, 1.0, 3.0, 0.98, 56.85},
    {85.0, 13.2, 24.2, 3.0, 2.0, 1.30, 56.68},
    {71.0, 18.0, 25.0, 1.0, 2.0, 0.82, 58.45},
    {43.0, 18.0, 22.6, 3.0, 3.0, 1.14, 55.50},
    {15.0, 16.8, 24.2, 2.0, 3.0, 0.50, 52.77},
    {43.0, 13.2, 22.6, 1.0, 1.0, 0.50, 57.36},
    {57.0, 15.6, 23.4, 3.0, 1.0, 0.66, 59.64},
};

}  // namespace

PistonSlapData piston_slap_dataset() {
  RawTable raw;
  raw.inputs.resize(kRuns, kInputs);
  raw.responses.resize(kRuns);
  for (int i = 0; i < kRuns; ++i) {
    for (int p = 0; p < kInputs; ++p) raw.inputs(i, p) = kRows[i][p];
    raw.responses[i] = kRows[i][kInputs];
  }

  const Eigen::VectorXd lo = raw.inputs.colwise().minCoeff();
  const Eigen::VectorXd hi = raw.inputs.colwise().maxCoeff();

  Dataset data = make_dataset(raw.inputs, raw.responses, lo, hi);
  // Standardize the centered responses so slap-noise units do not leak into
  // likelihood or penalty magnitudes; y_natural = scale * y + mean.
  const double sd = std::sqrt(data.responses.squaredNorm() / (kRuns - 1));
  data.responses /= sd;
  data.response_scale = sd;

  PistonSlapData out;
  out.raw = std::move(raw);
  out.data = std::move(data);
  return out;
}

}  // namespace gppen
