#include "tsc/masking/survival.hpp"

#include <cmath>
#include <numbers>

#include "tsc/core/errors.hpp"
#include "tsc/masking/column_mask.hpp"

namespace tsc {
namespace {

MonteCarloEstimate finish(Index hits, Index samples) {
  MonteCarloEstimate e;
  e.samples = samples;
  e.fraction = static_cast<double>(hits) / static_cast<double>(samples);
  e.standard_error = std::sqrt(e.fraction * (1.0 - e.fraction) / static_cast<double>(samples));
  return e;
}

}  // namespace

SurvivalProbability survival_probability(const MaskSchedule& schedule, Index num_layers) {
  if (num_layers == 0) throw InputError("survival_probability: need at least one layer");
  SurvivalProbability p;
  p.from_first_layer = 1.0;
  p.since_masking_start = 1.0;
  for (Index l = 1; l <= num_layers; ++l) {
    const double alpha = schedule.freeze_prob(l);
    p.from_first_layer *= alpha;
    if (l >= 3) p.since_masking_start *= alpha;
  }
  p.lower_bound = survival_lower_bound(schedule.lambda(), num_layers);
  return p;
}

double survival_lower_bound(double lambda, Index num_layers, double gamma) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::exp(-lambda * std::log(static_cast<double>(num_layers)) -
                  gamma * pi2 / 6.0 * lambda * lambda);
}

double chain_step_probability(const MaskSchedule& schedule, Index layer) {
  return (1.0 - schedule.freeze_prob(layer)) * schedule.freeze_prob(layer + 1);
}

MonteCarloEstimate simulate_survival(const MaskSchedule& schedule, Index num_layers, Index d,
                                     Index trials, Rng& rng) {
  Index hits = 0;
  std::vector<bool> alive(d);
  for (Index t = 0; t < trials; ++t) {
    alive.assign(d, true);
    for (Index l = 3; l <= num_layers; ++l) {
      const ColumnMask m = sample_mask(d, schedule.freeze_prob(l), rng, false);
      for (Index j = 0; j < d; ++j) alive[j] = alive[j] && !m.keep[j];
    }
    for (Index j = 0; j < d; ++j) hits += alive[j] ? 1 : 0;
  }
  return finish(hits, trials * d);
}

MonteCarloEstimate simulate_chain_step(const MaskSchedule& schedule, Index layer, Index d,
                                       Index trials, Rng& rng) {
  Index hits = 0;
  for (Index t = 0; t < trials; ++t) {
    const ColumnMask here = sample_mask(d, schedule.freeze_prob(layer), rng, false);
    const ColumnMask next = sample_mask(d, schedule.freeze_prob(layer + 1), rng, false);
    for (Index j = 0; j < d; ++j) hits += (here.keep[j] && !next.keep[j]) ? 1 : 0;
  }
  return finish(hits, trials * d);
}

}  // namespace tsc
