#include "tsc/graph/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsc/core/errors.hpp"

namespace tsc {

SparseMatrix::SparseMatrix(Index num_rows, Index num_cols,
                           std::vector<Index> row_offsets,
                           std::vector<Index> col_indices,
                           std::vector<double> values)
    : num_rows_(num_rows),
      num_cols_(num_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != num_rows_ + 1) {
    throw InputError("row_offsets must have num_rows+1 entries");
  }
  if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size() ||
      col_indices_.size() != values_.size()) {
    throw InputError("row_offsets must start at 0 and end at nnz");
  }
  for (Index r = 0; r < num_rows_; ++r) {
    if (row_offsets_[r] > row_offsets_[r + 1]) {
      throw InputError("row_offsets must be non-decreasing");
    }
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] >= num_cols_) {
        throw InputError("column index out of range in row " + std::to_string(r));
      }
      if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1]) {
        throw InputError("column indices must strictly increase within a row");
      }
      if (values_[k] == 0.0) throw InputError("explicit zero stored");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index num_rows, Index num_cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= num_rows || t.col >= num_cols) {
      throw InputError("triplet index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Index> offsets(num_rows + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (Index k = 0; k < triplets.size();) {
    const Index r = triplets[k].row;
    const Index c = triplets[k].col;
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) {
      sum += triplets[k].value;
    }
    if (sum != 0.0) {
      cols.push_back(c);
      vals.push_back(sum);
      ++offsets[r + 1];
    }
  }
  for (Index r = 0; r < num_rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix(num_rows, num_cols, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> offsets(n + 1);
  std::vector<Index> cols(n);
  for (Index i = 0; i <= n; ++i) offsets[i] = i;
  for (Index i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      std::vector<double>(n, 1.0));
}

std::span<const Index> SparseMatrix::row_cols(Index row) const {
  return std::span<const Index>(col_indices_).subspan(
      row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]);
}

std::span<const double> SparseMatrix::row_values(Index row) const {
  return std::span<const double>(values_).subspan(
      row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]);
}

double SparseMatrix::at(Index row, Index col) const {
  const auto cols = row_cols(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return row_values(row)[static_cast<Index>(it - cols.begin())];
}

Matrix SparseMatrix::to_dense() const {
  Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(num_rows_),
                              static_cast<Eigen::Index>(num_cols_));
  for (Index r = 0; r < num_rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_indices_[k])) =
          values_[k];
    }
  }
  return dense;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (Index r = 0; r < num_rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      t.push_back({col_indices_[k], r, values_[k]});
    }
  }
  return from_triplets(num_cols_, num_rows_, std::move(t));
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (num_rows_ != num_cols_) return false;
  for (Index r = 0; r < num_rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (std::abs(values_[k] - at(col_indices_[k], r)) > tol) return false;
    }
  }
  return true;
}

Matrix spmm(const SparseMatrix& sparse, const Matrix& dense) {
  if (sparse.cols() != static_cast<Index>(dense.rows())) {
    throw InputError("spmm: sparse has " + std::to_string(sparse.cols()) +
                     " columns but dense has " + std::to_string(dense.rows()) + " rows");
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(sparse.rows()), dense.cols());
  for (Index r = 0; r < sparse.rows(); ++r) {
    const auto cols = sparse.row_cols(r);
    const auto vals = sparse.row_values(r);
    auto out_row = out.row(static_cast<Eigen::Index>(r));
    for (Index k = 0; k < cols.size(); ++k) {
      out_row += vals[k] * dense.row(static_cast<Eigen::Index>(cols[k]));
    }
  }
  return out;
}

}  // namespace tsc
