#include "tsc/autodiff/adam.hpp"

#include <cmath>
#include <string>

#include "tsc/core/errors.hpp"

namespace tsc::ad {

AdamState::AdamState(AdamOptions options, std::span<const Matrix> params) : options_(options) {
  first_.reserve(params.size());
  second_.reserve(params.size());
  for (const Matrix& p : params) {
    first_.push_back(Matrix::Zero(p.rows(), p.cols()));
    second_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_.size()) {
    throw InputError("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols() ||
        params[i].rows() != state.first_[i].rows() || params[i].cols() != state.first_[i].cols()) {
      throw InputError("adam_step: shape mismatch for parameter " + std::to_string(i));
    }
    if (!grads[i].allFinite()) {
      Eigen::Index r = 0, c = 0;
      for (Eigen::Index k = 0; k < grads[i].size(); ++k) {
        if (!std::isfinite(grads[i].data()[k])) {
          r = k / grads[i].cols();
          c = k % grads[i].cols();
          break;
        }
      }
      throw TrainingError("adam_step: non-finite gradient in parameter " + std::to_string(i) +
                          " at (" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
  }

  const AdamOptions& o = state.options_;
  ++state.step_count_;
  const double t = static_cast<double>(state.step_count_);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix g = grads[i];
    if (o.weight_decay != 0.0) g += o.weight_decay * params[i];
    state.first_[i] = o.beta1 * state.first_[i] + (1.0 - o.beta1) * g;
    state.second_[i] = o.beta2 * state.second_[i] + (1.0 - o.beta2) * g.cwiseAbs2();
    params[i].array() -= o.learning_rate * (state.first_[i].array() / correction1) /
                         ((state.second_[i].array() / correction2).sqrt() + o.epsilon);
  }
}

}  // namespace tsc::ad
