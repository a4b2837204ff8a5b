#include "tsc/graph/sbm.hpp"

#include <algorithm>
#include <numeric>

#include "tsc/core/errors.hpp"
#include "tsc/core/rng.hpp"

namespace tsc {
namespace {

void shuffle(std::vector<Index>& v, Rng& rng) {
  for (Index i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

}  // namespace

GraphDataset generate_sbm(const SbmParams& p) {
  if (p.blocks == 0 || p.nodes_per_block == 0) {
    throw GenerationError("sbm: every block needs at least one node");
  }
  if (!(p.p_out >= 0.0 && p.p_out <= p.p_in && p.p_in <= 1.0)) {
    throw GenerationError("sbm: need 0 <= p_out <= p_in <= 1");
  }
  if (p.feature_dim < p.blocks) {
    throw GenerationError("sbm: feature_dim must be at least the number of blocks");
  }
  if (p.train_per_class == 0) {
    throw GenerationError("sbm: train_per_class must be positive");
  }

  GraphDataset ds;
  const Index n = p.blocks * p.nodes_per_block;
  ds.num_nodes = n;
  ds.num_features = p.feature_dim;
  ds.num_classes = p.blocks;
  ds.labels.resize(n);
  for (Index i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(i / p.nodes_per_block);

  Rng edge_rng = Rng::derive(p.seed, "sbm-edges");
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      const double prob = ds.labels[u] == ds.labels[v] ? p.p_in : p.p_out;
      if (edge_rng.bernoulli(prob)) ds.edges.emplace_back(u, v);
    }
  }

  Rng feature_rng = Rng::derive(p.seed, "sbm-features");
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p.feature_dim));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p.feature_dim; ++j) {
      const double signal = (static_cast<Index>(ds.labels[i]) == j) ? p.signal : 0.0;
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          signal + p.noise * feature_rng.normal();
    }
  }

  Rng split_rng = Rng::derive(p.seed, "sbm-split");
  ds.train_mask.assign(n, false);
  ds.test_mask.assign(n, false);
  const Index per_class =
      std::min(p.train_per_class, std::max<Index>(1, p.nodes_per_block / 2));
  std::vector<Index> rest;
  for (Index b = 0; b < p.blocks; ++b) {
    std::vector<Index> members(p.nodes_per_block);
    std::iota(members.begin(), members.end(), b * p.nodes_per_block);
    shuffle(members, split_rng);
    for (Index k = 0; k < members.size(); ++k) {
      if (k < per_class) {
        ds.train_mask[members[k]] = true;
      } else {
        rest.push_back(members[k]);
      }
    }
  }
  std::sort(rest.begin(), rest.end());
  shuffle(rest, split_rng);
  for (Index k = 0; k < std::min(p.max_test, rest.size()); ++k) ds.test_mask[rest[k]] = true;

  ds.validate();
  return ds;
}

GraphDataset generate_sbm(Index blocks, Index nodes_per_block, double p_in, double p_out,
                          Index feature_dim, std::uint64_t seed) {
  SbmParams p;
  p.blocks = blocks;
  p.nodes_per_block = nodes_per_block;
  p.p_in = p_in;
  p.p_out = p_out;
  p.feature_dim = feature_dim;
  p.seed = seed;
  return generate_sbm(p);
}

}  // namespace tsc
