#pragma once

// Piston slap noise training data: a 12-run computer experiment with six
// input settings (cylinder liner, location of peak pressure, skirt length,
// skirt profile, skirt ovality, pin offset) and the measured slap noise.

#include <Eigen/Dense>

#include "gppenalty/dataset.hpp"

namespace gppen {

// Raw rectangular data in natural units: one input row per run plus the
// matching response vector.
struct RawTable {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd responses;
};

struct PistonSlapData {
  RawTable raw;   // natural units, as recorded
  Dataset data;   // inputs scaled to [0,1] by observed ranges; responses
                  // centered and standardized (response_scale = sample SD)
};

// The 12-run training set.  Input bounds are the observed per-column
// min/max, so the scaled design touches 0 and 1 in every column.
PistonSlapData piston_slap_dataset();

}  // namespace gppen
