#pragma once

#include <span>
#include <vector>

#include "tsc/core/matrix.hpp"

namespace tsc::ad {

struct AdamOptions {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// L2 penalty added to the gradient before the moment updates.
  double weight_decay = 5e-4;
};

class AdamState {
 public:
  AdamState(AdamOptions options, std::span<const Matrix> params);

  const AdamOptions& options() const { return options_; }
  std::size_t step_count() const { return step_count_; }
  const Matrix& first_moment(std::size_t i) const { return first_[i]; }
  const Matrix& second_moment(std::size_t i) const { return second_[i]; }

 private:
  friend void adam_step(std::span<Matrix> params, std::span<const Matrix> grads,
                        AdamState& state);

  AdamOptions options_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  std::size_t step_count_ = 0;
};

/// Bias-corrected Adam update in place. Throws TrainingError naming the
/// offending parameter when a gradient entry is not finite; no parameter is
/// modified in that case.
void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state);

}  // namespace tsc::ad
