#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsc/autodiff/tape.hpp"
#include "tsc/core/rng.hpp"

namespace tsc {

struct ContrastiveConfig {
  double temperature = 0.5;
  /// Weight of the contrastive term next to the classification loss.
  double loss_weight = 1.0;
  /// Negatives drawn per anchor. Unset means every other node is a negative.
  std::optional<Index> negative_cap;

  /// Throws ConfigError on tau <= 0, negative weight or a zero cap.
  void validate() const;
};

/// Sum over anchors i of
///   -log( e^{s(a_i, b_i)/tau} / sum_{j != i} [ e^{s(a_i, a_j)/tau} + e^{s(a_i, b_j)/tau} ] )
/// with s the cosine similarity. `anchor` and `other` must share a shape and
/// have n >= 2 rows (InputError otherwise). With negative_cap set, each anchor
/// uses negative_cap uniformly drawn j != i (with replacement) from
/// `negative_rng` and the denominator is rescaled by (n-1)/negative_cap.
ad::Value contrastive_pair_loss(const ad::Value& anchor, const ad::Value& other,
                                const ContrastiveConfig& config, Rng* negative_rng = nullptr);

/// Cross-layer loss over consecutive pairs: layers[k+1] anchors against
/// layers[k]. Needs at least two equally shaped layers.
ad::Value loss_sgc(std::span<const ad::Value> layers, const ContrastiveConfig& config,
                   Rng* negative_rng = nullptr);

/// Two dropout views of the final representation contrasted node by node.
/// Both views draw from `view_rng`, so they use distinct randomness.
ad::Value loss_gcn(const ad::Value& h_final, double dropout_rate, const ContrastiveConfig& config,
                   Rng& view_rng, Rng* negative_rng = nullptr);

/// Per-node split of one pair's loss term into s(h_i^next, h_i^prev)/tau
/// (align) and the log of the negative sum (heter); term = heter - align.
struct Decomposition {
  double align = 0.0;
  double heter = 0.0;
};

Decomposition decompose(const Matrix& h_next, const Matrix& h_prev, Index node, double tau);
std::vector<Decomposition> decompose_all(const Matrix& h_next, const Matrix& h_prev, double tau);

}  // namespace tsc
