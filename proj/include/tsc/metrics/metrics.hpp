#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "tsc/core/matrix.hpp"
#include "tsc/graph/sparse_matrix.hpp"

namespace tsc {

/// Fraction of masked rows whose argmax (lowest index on ties) equals the
/// label. InputError on an empty mask or mismatched sizes.
double accuracy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask);

/// Mean cosine distance 1 - cos(h_i, h_j) over ordered pairs i != j. A zero
/// row is at distance 1 from every row. Needs n >= 2.
double mad(const Matrix& h);

enum class Reachability {
  /// S_ij = [((A+I)^l)_ij > 0]: j within l hops of i.
  with_self_loops,
  /// S_ij = [(A^l)_ij > 0]: some walk of exactly l steps joins i and j.
  strict,
};

/// Off-diagonal pattern of the l-th power, row by row (sorted columns).
/// Computed from boolean frontiers, never from numeric powers.
std::vector<std::vector<Index>> reachability(const SparseMatrix& adjacency, Index order,
                                             Reachability mode = Reachability::with_self_loops);

/// Mean of S S^T over all n^2 entries, diagonal included.
double amo(const SparseMatrix& adjacency, Index order,
           Reachability mode = Reachability::with_self_loops);

/// (1/n) times the number of ordered pairs i != j with S_ij = 1 and
/// different labels.
double andcnn(const SparseMatrix& adjacency, std::span<const int> labels, Index order,
              Reachability mode = Reachability::with_self_loops);

struct MetricReport {
  double accuracy = 0.0;
  std::vector<double> mad_per_layer;
  std::vector<Index> orders;
  std::vector<double> amo_per_order;
  std::vector<double> andcnn_per_order;
};

/// Graph-only part of a report: AMO and ANDCNN at each order.
void fill_neighbor_metrics(MetricReport& report, const SparseMatrix& adjacency,
                           std::span<const int> labels, std::span<const Index> orders,
                           Reachability mode = Reachability::with_self_loops);

nlohmann::json to_json(const MetricReport& report);

}  // namespace tsc
