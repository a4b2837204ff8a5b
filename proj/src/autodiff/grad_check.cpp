#include "tsc/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "tsc/core/errors.hpp"

namespace tsc::ad {
namespace {

double evaluate(const LossBuilder& build, const std::vector<Matrix>& params) {
  Tape tape;
  std::vector<Value> leaves;
  leaves.reserve(params.size());
  for (const Matrix& p : params) leaves.push_back(tape.leaf(p, false));
  return build(tape, leaves).item();
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& build, std::vector<Matrix> params,
                           double epsilon) {
  std::vector<Matrix> analytic;
  {
    Tape tape;
    std::vector<Value> leaves;
    for (const Matrix& p : params) leaves.push_back(tape.leaf(p, true));
    Value loss = build(tape, leaves);
    tape.backward(loss);
    for (const Value& leaf : leaves) analytic.push_back(leaf.grad());
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (Eigen::Index k = 0; k < params[i].size(); ++k) {
      double& x = params[i].data()[k];
      const double saved = x;
      x = saved + epsilon;
      const double plus = evaluate(build, params);
      x = saved - epsilon;
      const double minus = evaluate(build, params);
      x = saved;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic[i].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double err = std::abs(a - numeric) / denom;
      if (err > result.max_rel_error || !std::isfinite(err)) {
        result.max_rel_error = std::isfinite(err) ? err : INFINITY;
        result.param = i;
        result.row = k / params[i].cols();
        result.col = k % params[i].cols();
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace tsc::ad
