#include "tsc/masking/column_mask.hpp"

#include <string>

#include "tsc/autodiff/ops.hpp"
#include "tsc/core/errors.hpp"

namespace tsc {

Index ColumnMask::kept_count() const {
  Index count = 0;
  for (bool k : keep) count += k ? 1 : 0;
  return count;
}

ColumnMask sample_mask(Index d, double freeze_prob, Rng& rng, bool guarantee_update) {
  if (d == 0) throw InputError("sample_mask: need at least one column");
  ColumnMask mask;
  mask.keep.resize(d);
  bool any_kept = false;
  for (Index j = 0; j < d; ++j) {
    mask.keep[j] = !(rng.uniform() < freeze_prob);
    any_kept = any_kept || mask.keep[j];
  }
  if (guarantee_update && !any_kept) mask.keep[rng.uniform_index(d)] = true;
  return mask;
}

Matrix masked_propagate_sgc(const SparseMatrix& propagation, const Matrix& h_prev,
                            const ColumnMask& mask) {
  if (mask.size() != static_cast<Index>(h_prev.cols())) {
    throw InputError("masked_propagate_sgc: mask width does not match representation");
  }
  const Matrix aggregated = spmm(propagation, h_prev);
  Matrix out = h_prev;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (mask.keep[static_cast<Index>(j)]) out.col(j) = aggregated.col(j);
  }
  return out;
}

ad::Value masked_propagate_sgc(const SparseMatrix& propagation, const ad::Value& h_prev,
                               const ColumnMask& mask) {
  return ad::select_columns(ad::spmm_const(propagation, h_prev), h_prev, mask.keep);
}

ad::Value masked_layer_gcn(const SparseMatrix& propagation, const ad::Value& h_prev,
                           const ad::Value& weight, const ColumnMask& mask) {
  if (weight.rows() != weight.cols()) {
    throw ConfigError("masked GCN layers need a square weight, got " +
                      std::to_string(weight.rows()) + "x" + std::to_string(weight.cols()));
  }
  const ad::Value aggregated =
      ad::relu(ad::matmul(ad::spmm_const(propagation, h_prev), weight));
  return ad::select_columns(aggregated, h_prev, mask.keep);
}

}  // namespace tsc
