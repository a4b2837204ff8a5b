#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsc/autodiff/tape.hpp"
#include "tsc/core/rng.hpp"
#include "tsc/graph/sparse_matrix.hpp"
#include "tsc/masking/column_mask.hpp"
#include "tsc/models/model_config.hpp"

namespace tsc {

/// Trainable tensors in a fixed order.
///   SGC: proj_0 .. proj_{k-1}, cls_weight, cls_bias
///   GCN: w_in, w_2 .. w_L, cls_weight, cls_bias
struct ModelParams {
  std::vector<std::string> names;
  std::vector<Matrix> values;

  std::size_t size() const { return values.size(); }
  const Matrix& at(std::string_view name) const;
};

/// Glorot-uniform weights, zero biases, drawn from `init_rng`.
ModelParams init_params(const ModelConfig& config, Index num_features, Index num_classes,
                        Rng& init_rng);

/// One mask per layer 1..depth (index l-1). All-keep when masking is off.
std::vector<ColumnMask> sample_masks(const ModelConfig& config, Rng& mask_rng);

/// Representations H^(0..L) and logits on a tape.
struct TapeForward {
  std::vector<ad::Value> layers;
  ad::Value logits;
};

/// Immutable copy of a forward pass.
struct ForwardTrace {
  std::vector<Matrix> per_layer;
  Matrix logits;
};

ForwardTrace snapshot(const TapeForward& forward);

/// H^(0) = X W_proj. ConfigError on a shape mismatch.
ad::Value project_input(const ad::Value& features, const ad::Value& projection);

/// H^(0) from the projector, then masked propagation for layers 1..L and a
/// linear classifier on H^(L). `params` are tape leaves in ModelParams order.
TapeForward forward_sgc_tsc(const ad::Value& features, const SparseMatrix& propagation,
                            const ModelConfig& config, std::span<const ad::Value> params,
                            std::span<const ColumnMask> masks, bool training, Rng& dropout_rng);

/// H^(0) = dropout(X) W_in, H^(1) = relu(L H^(0)), masked GCN layers 2..L,
/// linear classifier on H^(L).
TapeForward forward_gcn_tsc(const ad::Value& features, const SparseMatrix& propagation,
                            const ModelConfig& config, std::span<const ad::Value> params,
                            std::span<const ColumnMask> masks, bool training, Rng& dropout_rng);

/// Dispatches on config.backbone.
TapeForward forward_model(const ad::Value& features, const SparseMatrix& propagation,
                          const ModelConfig& config, std::span<const ad::Value> params,
                          std::span<const ColumnMask> masks, bool training, Rng& dropout_rng);

/// Evaluation-mode forward without gradients.
ForwardTrace evaluate_model(const Matrix& features, const SparseMatrix& propagation,
                            const ModelConfig& config, const ModelParams& params,
                            std::span<const ColumnMask> masks);

struct LossParts {
  ad::Value classification;
  /// Invalid when the contrastive term is off (or depth < 2 for SGC).
  ad::Value contrastive;
  ad::Value total;
};

/// CE on the train mask plus beta times the backbone's contrastive term:
/// loss_sgc over H^(1..L) for SGC, loss_gcn on H^(L) for GCN.
LossParts total_loss(const TapeForward& forward, std::span<const int> labels,
                     const std::vector<bool>& train_mask, const ModelConfig& config,
                     Rng& view_rng, Rng* negative_rng = nullptr);

}  // namespace tsc
