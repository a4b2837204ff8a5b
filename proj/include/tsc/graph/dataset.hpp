#pragma once

#include <utility>
#include <vector>

#include "tsc/core/matrix.hpp"

namespace tsc {

using Edge = std::pair<Index, Index>;

/// Node-classification graph with a fixed train/test split.
struct GraphDataset {
  Index num_nodes = 0;
  Index num_features = 0;
  Index num_classes = 0;
  std::vector<Edge> edges;  // unordered pairs, stored u < v
  Matrix features;          // num_nodes x num_features
  std::vector<int> labels;
  std::vector<bool> train_mask;
  std::vector<bool> test_mask;

  /// Throws InputError on the first violated invariant: self-loops or
  /// duplicate pairs, endpoints out of range, shape mismatches, labels out of
  /// range, overlapping masks, a class absent from the train mask, or
  /// non-finite features.
  void validate() const;

  Index train_count() const;
  Index test_count() const;
};

/// Divides each feature row by its L1 norm; all-zero rows are left as is.
void row_normalize(Matrix& features);

}  // namespace tsc
