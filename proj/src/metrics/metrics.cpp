#include "tsc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tsc/core/errors.hpp"

namespace tsc {

double accuracy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask) {
  const auto n = static_cast<std::size_t>(logits.rows());
  if (labels.size() != n || mask.size() != n) throw InputError("accuracy: size mismatch");
  if (logits.cols() < 1) throw InputError("accuracy: logits have no columns");
  Index total = 0;
  Index correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    ++total;
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(static_cast<Eigen::Index>(i), c) > logits(static_cast<Eigen::Index>(i), best)) {
        best = c;
      }
    }
    if (best == labels[i]) ++correct;
  }
  if (total == 0) throw InputError("accuracy: empty mask");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double mad(const Matrix& h) {
  const Eigen::Index n = h.rows();
  if (n < 2) throw InputError("mad: need at least two rows");
  // sum_{i != j} cos_ij = |sum_i u_i|^2 - sum_i |u_i|^2 with u_i the unit rows
  // (zero rows contribute nothing).
  Vector total = Vector::Zero(h.cols());
  double self = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = h.row(i).norm();
    if (norm == 0.0) continue;
    total += h.row(i).transpose() / norm;
    self += 1.0;
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  const double cos_sum = total.squaredNorm() - self;
  return 1.0 - cos_sum / pairs;
}

std::vector<std::vector<Index>> reachability(const SparseMatrix& adjacency, Index order,
                                             Reachability mode) {
  if (order < 1) throw InputError("reachability: order must be at least 1");
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) throw InputError("reachability: adjacency must be square");
  std::vector<std::vector<Index>> rows(n);
  std::vector<Index> stamp(n, 0);
  std::vector<Index> frontier;
  std::vector<Index> next;
  Index epoch = 0;
  for (Index i = 0; i < n; ++i) {
    if (mode == Reachability::with_self_loops) {
      // Breadth-first ball of radius `order`.
      ++epoch;
      stamp[i] = epoch;
      frontier.assign(1, i);
      std::vector<Index>& ball = rows[i];
      for (Index step = 0; step < order && !frontier.empty(); ++step) {
        next.clear();
        for (Index u : frontier) {
          for (Index v : adjacency.row_cols(u)) {
            if (stamp[v] == epoch) continue;
            stamp[v] = epoch;
            next.push_back(v);
            ball.push_back(v);
          }
        }
        frontier.swap(next);
      }
    } else {
      // Set of endpoints of walks with exactly k steps, k = 1..order.
      frontier.assign(1, i);
      for (Index step = 0; step < order && !frontier.empty(); ++step) {
        ++epoch;
        next.clear();
        for (Index u : frontier) {
          for (Index v : adjacency.row_cols(u)) {
            if (stamp[v] == epoch) continue;
            stamp[v] = epoch;
            next.push_back(v);
          }
        }
        frontier.swap(next);
      }
      for (Index v : frontier) {
        if (v != i) rows[i].push_back(v);
      }
    }
    std::sort(rows[i].begin(), rows[i].end());
  }
  return rows;
}

double amo(const SparseMatrix& adjacency, Index order, Reachability mode) {
  const auto rows = reachability(adjacency, order, mode);
  const Index n = adjacency.rows();
  if (n == 0) return 0.0;
  // mean(S S^T) = sum_k (column count k)^2 / n^2
  std::vector<double> col_count(n, 0.0);
  for (const auto& r : rows) {
    for (Index k : r) col_count[k] += 1.0;
  }
  double total = 0.0;
  for (double c : col_count) total += c * c;
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

double andcnn(const SparseMatrix& adjacency, std::span<const int> labels, Index order,
              Reachability mode) {
  const Index n = adjacency.rows();
  if (labels.size() != n) throw InputError("andcnn: one label per node required");
  if (n == 0) return 0.0;
  const auto rows = reachability(adjacency, order, mode);
  double count = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j : rows[i]) {
      if (labels[i] != labels[j]) count += 1.0;
    }
  }
  return count / static_cast<double>(n);
}

void fill_neighbor_metrics(MetricReport& report, const SparseMatrix& adjacency,
                           std::span<const int> labels, std::span<const Index> orders,
                           Reachability mode) {
  report.orders.assign(orders.begin(), orders.end());
  report.amo_per_order.clear();
  report.andcnn_per_order.clear();
  for (Index l : orders) {
    report.amo_per_order.push_back(amo(adjacency, l, mode));
    report.andcnn_per_order.push_back(andcnn(adjacency, labels, l, mode));
  }
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"accuracy", r.accuracy},
          {"mad_per_layer", r.mad_per_layer},
          {"orders", r.orders},
          {"amo_per_order", r.amo_per_order},
          {"andcnn_per_order", r.andcnn_per_order}};
}

}  // namespace tsc
