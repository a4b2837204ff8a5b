#pragma once

#include <span>
#include <vector>

#include "tsc/core/matrix.hpp"

namespace tsc {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse-row matrix in canonical form: column indices strictly
/// increase within each row and no explicit zeros are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of raw CSR arrays. Throws InputError unless they are
  /// already canonical.
  SparseMatrix(Index num_rows, Index num_cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  /// Duplicates are summed; entries that sum to zero are dropped.
  static SparseMatrix from_triplets(Index num_rows, Index num_cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);

  Index rows() const { return num_rows_; }
  Index cols() const { return num_cols_; }
  Index nnz() const { return values_.size(); }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index row) const;
  std::span<const double> row_values(Index row) const;

  /// Stored value or 0.
  double at(Index row, Index col) const;

  Matrix to_dense() const;
  SparseMatrix transpose() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  Index num_rows_ = 0;
  Index num_cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

/// sparse * dense. Each output entry sums in ascending column order.
Matrix spmm(const SparseMatrix& sparse, const Matrix& dense);

}  // namespace tsc
