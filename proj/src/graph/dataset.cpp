#include "tsc/graph/dataset.hpp"

#include <cmath>
#include <set>
#include <string>

#include "tsc/core/errors.hpp"

namespace tsc {

void GraphDataset::validate() const {
  const auto n = static_cast<Eigen::Index>(num_nodes);
  if (features.rows() != n || features.cols() != static_cast<Eigen::Index>(num_features)) {
    throw InputError("features must be num_nodes x num_features");
  }
  if (labels.size() != num_nodes || train_mask.size() != num_nodes ||
      test_mask.size() != num_nodes) {
    throw InputError("labels and masks must have num_nodes entries");
  }
  if (num_classes == 0) throw InputError("num_classes must be positive");
  if (!features.allFinite()) throw InputError("features contain NaN or Inf");

  std::set<Edge> seen;
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw InputError("edge endpoint out of range: (" + std::to_string(u) + "," +
                       std::to_string(v) + ")");
    }
    if (u == v) throw InputError("self-loop at node " + std::to_string(u));
    const Edge key{std::min(u, v), std::max(u, v)};
    if (!seen.insert(key).second) {
      throw InputError("duplicate edge (" + std::to_string(key.first) + "," +
                       std::to_string(key.second) + ")");
    }
  }

  std::vector<bool> class_in_train(num_classes, false);
  for (Index i = 0; i < num_nodes; ++i) {
    if (labels[i] < 0 || static_cast<Index>(labels[i]) >= num_classes) {
      throw InputError("label out of range at node " + std::to_string(i));
    }
    if (train_mask[i] && test_mask[i]) {
      throw InputError("node " + std::to_string(i) + " is in both train and test masks");
    }
    if (train_mask[i]) class_in_train[static_cast<Index>(labels[i])] = true;
  }
  for (Index c = 0; c < num_classes; ++c) {
    if (!class_in_train[c]) {
      throw InputError("class " + std::to_string(c) + " has no training node");
    }
  }
}

Index GraphDataset::train_count() const {
  Index count = 0;
  for (bool b : train_mask) count += b ? 1 : 0;
  return count;
}

Index GraphDataset::test_count() const {
  Index count = 0;
  for (bool b : test_mask) count += b ? 1 : 0;
  return count;
}

void row_normalize(Matrix& features) {
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    const double norm = features.row(r).lpNorm<1>();
    if (norm > 0.0) features.row(r) /= norm;
  }
}

}  // namespace tsc
