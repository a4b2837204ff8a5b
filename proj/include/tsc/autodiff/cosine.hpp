#pragma once

#include "tsc/core/matrix.hpp"

namespace tsc::ad {

/// Cosine similarity between the rows of a and the rows of b, with the
/// pieces its backward pass needs.
struct CosineParts {
  Matrix sim;
  Vector norm_a;
  Vector norm_b;
};

/// When `self` is set, b is ignored and the symmetric a-vs-a matrix is built.
CosineParts cosine_parts(const Matrix& a, const Matrix& b, bool self = false);

/// Gradient of a loss through S = cos(a, b) given dL/dS:
///   dL/da = d_gram * b + diag(coef_a) * a
///   dL/db = d_gram^T * a + diag(coef_b) * b
struct CosineGrad {
  Matrix d_gram;
  Vector coef_a;
  Vector coef_b;
};

CosineGrad cosine_grad(const CosineParts& parts, const Matrix& d_sim);

}  // namespace tsc::ad
