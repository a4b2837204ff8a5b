#pragma once

#include "tsc/core/rng.hpp"
#include "tsc/masking/schedule.hpp"

namespace tsc {

/// gamma used when reporting the analytic lower bound; the bound needs
/// gamma > 0.5.
inline constexpr double kBoundGamma = 0.5 + 1e-6;

struct SurvivalProbability {
  /// prod_{l=1..L} alpha(l). Zero whenever the schedule's shallow layers are
  /// never frozen.
  double from_first_layer = 0.0;
  /// prod_{l=3..L} alpha(l): probability that a column reaching layer L still
  /// holds its layer-2 value (1 for L <= 2).
  double since_masking_start = 1.0;
  /// exp(-lambda ln L - gamma pi^2 lambda^2 / 6).
  double lower_bound = 0.0;
};

/// Computed without the at-least-one-update guarantee (columns independent).
SurvivalProbability survival_probability(const MaskSchedule& schedule, Index num_layers);

double survival_lower_bound(double lambda, Index num_layers, double gamma = kBoundGamma);

/// P(column at layer l+1 equals the aggregated value of layer l)
///   = (1 - alpha(l)) * alpha(l+1).
double chain_step_probability(const MaskSchedule& schedule, Index layer);

struct MonteCarloEstimate {
  double fraction = 0.0;
  double standard_error = 0.0;
  Index samples = 0;
};

/// Samples `trials` independent mask sequences of width d (guarantee off) and
/// reports the fraction of columns frozen at every layer 3..num_layers.
MonteCarloEstimate simulate_survival(const MaskSchedule& schedule, Index num_layers, Index d,
                                     Index trials, Rng& rng);

/// Fraction of columns aggregated at `layer` and frozen at `layer + 1`.
MonteCarloEstimate simulate_chain_step(const MaskSchedule& schedule, Index layer, Index d,
                                       Index trials, Rng& rng);

}  // namespace tsc
