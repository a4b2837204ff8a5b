#pragma once

#include <cstdint>

#include "tsc/graph/dataset.hpp"

namespace tsc {

struct SbmParams {
  Index blocks = 2;
  Index nodes_per_block = 50;
  double p_in = 0.5;
  double p_out = 0.05;
  Index feature_dim = 8;
  std::uint64_t seed = 0;
  /// Feature j of a node in block b is signal * [j == b] + noise * N(0, 1).
  double signal = 1.0;
  double noise = 1.0;
  /// Capped at half the block size (at least one node) for small blocks.
  Index train_per_class = 20;
  Index max_test = 1000;
};

/// Stochastic block model with labels equal to block ids. Nodes are numbered
/// block by block. Deterministic for a fixed seed.
///
/// Throws GenerationError for empty blocks, invalid probabilities
/// (0 <= p_out <= p_in <= 1 is required), or feature_dim < blocks.
GraphDataset generate_sbm(const SbmParams& params);

GraphDataset generate_sbm(Index blocks, Index nodes_per_block, double p_in, double p_out,
                          Index feature_dim, std::uint64_t seed);

}  // namespace tsc
