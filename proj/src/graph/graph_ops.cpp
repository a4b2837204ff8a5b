#include "tsc/graph/graph_ops.hpp"

#include <cmath>
#include <string>

#include "tsc/core/errors.hpp"

namespace tsc {

SparseMatrix build_adjacency(Index num_nodes, const std::vector<Edge>& edges) {
  std::vector<Triplet> t;
  t.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (u == v) throw InputError("self-loop at node " + std::to_string(u));
    t.push_back({u, v, 1.0});
    t.push_back({v, u, 1.0});
  }
  SparseMatrix a = SparseMatrix::from_triplets(num_nodes, num_nodes, std::move(t));
  for (double value : a.values()) {
    if (value != 1.0) throw InputError("duplicate edge in edge list");
  }
  return a;
}

SparseMatrix build_adjacency(const GraphDataset& dataset) {
  return build_adjacency(dataset.num_nodes, dataset.edges);
}

std::vector<Edge> extract_edges(const SparseMatrix& adjacency) {
  std::vector<Edge> edges;
  for (Index r = 0; r < adjacency.rows(); ++r) {
    for (Index c : adjacency.row_cols(r)) {
      if (c > r) edges.emplace_back(r, c);
    }
  }
  return edges;
}

DegreeVector degrees(const SparseMatrix& adjacency) {
  DegreeVector d;
  d.degrees.resize(adjacency.rows(), 0);
  for (Index r = 0; r < adjacency.rows(); ++r) {
    for (Index c : adjacency.row_cols(r)) {
      if (c != r) ++d.degrees[r];
    }
  }
  return d;
}

SparseMatrix normalize_sym(const SparseMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw InputError("normalize_sym: adjacency must be square");
  }
  const Index n = adjacency.rows();
  std::vector<Triplet> t;
  t.reserve(adjacency.nnz() + n);
  std::vector<double> inv_sqrt(n);
  for (Index r = 0; r < n; ++r) {
    double deg = 1.0;  // self-loop
    for (Index k = 0; k < adjacency.row_cols(r).size(); ++k) {
      if (adjacency.row_cols(r)[k] != r) deg += adjacency.row_values(r)[k];
    }
    inv_sqrt[r] = 1.0 / std::sqrt(deg);
  }
  for (Index r = 0; r < n; ++r) {
    t.push_back({r, r, inv_sqrt[r] * inv_sqrt[r]});
    const auto cols = adjacency.row_cols(r);
    const auto vals = adjacency.row_values(r);
    for (Index k = 0; k < cols.size(); ++k) {
      if (cols[k] == r) continue;
      t.push_back({r, cols[k], inv_sqrt[r] * vals[k] * inv_sqrt[cols[k]]});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

Matrix propagate_power(const SparseMatrix& propagation, const Matrix& x, Index steps) {
  Matrix h = x;
  for (Index s = 0; s < steps; ++s) h = spmm(propagation, h);
  return h;
}

double limit_row_value(const DegreeVector& degree, Index num_edges, Index num_nodes,
                       Index i, Index j) {
  const double di = static_cast<double>(degree[i]) + 1.0;
  const double dj = static_cast<double>(degree[j]) + 1.0;
  return std::sqrt(di * dj) / static_cast<double>(2 * num_edges + num_nodes);
}

std::vector<Index> connected_components(const SparseMatrix& adjacency) {
  const Index n = adjacency.rows();
  const Index unset = static_cast<Index>(-1);
  std::vector<Index> comp(n, unset);
  std::vector<Index> stack;
  Index next = 0;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : adjacency.row_cols(u)) {
        if (comp[v] == unset) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace tsc
