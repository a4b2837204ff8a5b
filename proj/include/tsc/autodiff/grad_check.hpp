#pragma once

#include <functional>
#include <vector>

#include "tsc/autodiff/tape.hpp"

namespace tsc::ad {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t param = 0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Builds a scalar loss on a fresh tape from leaves holding `params`. Must be
/// deterministic: any randomness has to be reseeded inside the builder.
using LossBuilder = std::function<Value(Tape&, const std::vector<Value>&)>;

/// Compares backward gradients against central differences at every
/// coordinate. The relative error of a coordinate is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckResult grad_check(const LossBuilder& build, std::vector<Matrix> params,
                           double epsilon = 1e-5);

}  // namespace tsc::ad
