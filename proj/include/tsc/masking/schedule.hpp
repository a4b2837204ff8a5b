#pragma once

#include <span>
#include <vector>

#include "tsc/core/matrix.hpp"

namespace tsc {

/// Probability that a representation column is frozen (skips aggregation) at
/// a 1-based layer: 0 for layers 1 and 2, clamp(1 - ln(lambda/layer + 1), 0, 1)
/// from layer 3 on. Throws ConfigError unless lambda > 0, InputError for
/// layer 0.
double schedule_rate(double lambda, Index layer);

/// Freeze probabilities for layers 1..num_layers.
class MaskSchedule {
 public:
  MaskSchedule(double lambda, Index num_layers);

  double lambda() const { return lambda_; }
  Index num_layers() const { return freeze_prob_.size(); }
  /// 1-based.
  double freeze_prob(Index layer) const;
  std::span<const double> freeze_probs() const { return freeze_prob_; }

 private:
  double lambda_;
  std::vector<double> freeze_prob_;
};

}  // namespace tsc
