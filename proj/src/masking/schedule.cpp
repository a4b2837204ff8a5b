#include "tsc/masking/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsc/core/errors.hpp"

namespace tsc {

double schedule_rate(double lambda, Index layer) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("masking lambda must be a positive finite number");
  }
  if (layer == 0) throw InputError("masking layers are numbered from 1");
  if (layer <= 2) return 0.0;
  const double rate = 1.0 - std::log(lambda / static_cast<double>(layer) + 1.0);
  return std::clamp(rate, 0.0, 1.0);
}

MaskSchedule::MaskSchedule(double lambda, Index num_layers) : lambda_(lambda) {
  freeze_prob_.reserve(num_layers);
  for (Index l = 1; l <= num_layers; ++l) freeze_prob_.push_back(schedule_rate(lambda, l));
  if (num_layers == 0) schedule_rate(lambda, 1);  // still validate lambda
}

double MaskSchedule::freeze_prob(Index layer) const {
  if (layer == 0 || layer > freeze_prob_.size()) {
    throw InputError("layer " + std::to_string(layer) + " outside schedule of " +
                     std::to_string(freeze_prob_.size()) + " layers");
  }
  return freeze_prob_[layer - 1];
}

}  // namespace tsc
