#pragma once

#include <vector>

#include "tsc/core/matrix.hpp"
#include "tsc/graph/dataset.hpp"
#include "tsc/graph/sparse_matrix.hpp"

namespace tsc {

/// Degrees excluding self-loops.
struct DegreeVector {
  std::vector<Index> degrees;

  Index size() const { return degrees.size(); }
  Index operator[](Index i) const { return degrees[i]; }
};

/// Symmetric binary adjacency with a zero diagonal.
SparseMatrix build_adjacency(Index num_nodes, const std::vector<Edge>& edges);
SparseMatrix build_adjacency(const GraphDataset& dataset);

/// Upper-triangle edge list (u < v) of a symmetric adjacency.
std::vector<Edge> extract_edges(const SparseMatrix& adjacency);

DegreeVector degrees(const SparseMatrix& adjacency);

/// D~^{-1/2} (A + I) D~^{-1/2} where D~ holds the degrees of A + I.
SparseMatrix normalize_sym(const SparseMatrix& adjacency);

/// L^steps * x by repeated spmm.
Matrix propagate_power(const SparseMatrix& propagation, const Matrix& x, Index steps);

/// Entry (i, j) of the infinite-depth propagation operator of a connected
/// graph: sqrt((d_i + 1)(d_j + 1)) / (2m + n).
double limit_row_value(const DegreeVector& degree, Index num_edges, Index num_nodes,
                       Index i, Index j);

/// Component id per node, numbered in order of first appearance.
std::vector<Index> connected_components(const SparseMatrix& adjacency);

}  // namespace tsc
