#pragma once

#include <vector>

#include "tsc/autodiff/tape.hpp"
#include "tsc/core/rng.hpp"
#include "tsc/graph/sparse_matrix.hpp"

namespace tsc {

/// keep[j] == true: column j is aggregated at this layer. false: column j is
/// copied from the previous layer.
struct ColumnMask {
  std::vector<bool> keep;

  static ColumnMask all_keep(Index d) { return {std::vector<bool>(d, true)}; }
  Index size() const { return keep.size(); }
  Index kept_count() const;
};

/// Freezes each of d columns independently with probability freeze_prob.
/// With `guarantee_update`, a mask that froze every column gets one
/// uniformly chosen column switched back to aggregation.
ColumnMask sample_mask(Index d, double freeze_prob, Rng& rng, bool guarantee_update = true);

/// One masked SGC step: kept columns become (L h)_{:,j}, frozen columns keep
/// h_{:,j}.
Matrix masked_propagate_sgc(const SparseMatrix& propagation, const Matrix& h_prev,
                            const ColumnMask& mask);
ad::Value masked_propagate_sgc(const SparseMatrix& propagation, const ad::Value& h_prev,
                               const ColumnMask& mask);

/// Masked GCN layer. Kept columns take relu(L h_prev W)_{:,j}; frozen columns
/// pass h_prev_{:,j} through untouched by the transform and the activation.
/// W must be square (ConfigError otherwise).
ad::Value masked_layer_gcn(const SparseMatrix& propagation, const ad::Value& h_prev,
                           const ad::Value& weight, const ColumnMask& mask);

}  // namespace tsc
