#pragma once

#include <span>
#include <vector>

#include "tsc/autodiff/tape.hpp"
#include "tsc/core/rng.hpp"
#include "tsc/graph/sparse_matrix.hpp"

namespace tsc::ad {

/// Guards the cosine denominator ||a|| ||b|| + eps against all-zero rows.
inline constexpr double kCosineEps = 1e-12;

Value matmul(const Value& a, const Value& b);
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
/// a (r x c) plus a 1 x c bias broadcast over rows.
Value add_row_bias(const Value& a, const Value& bias);
Value hadamard(const Value& a, const Value& b);
Value scale(const Value& a, double factor);
/// 1x1 sum of all entries.
Value sum(const Value& a);

/// L * h with constant L. The backward pass applies L^T. `propagation` must
/// outlive the tape's backward pass.
Value spmm_const(const SparseMatrix& propagation, const Value& h);

/// max(0, x); the subgradient at 0 is 0.
Value relu(const Value& x);

/// Inverted dropout: in training mode each entry is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate). Identity otherwise.
/// Throws InputError unless 0 <= rate < 1.
Value dropout(const Value& x, double rate, bool training, Rng& rng);

Value log_softmax_rows(const Value& x);

/// Mean over masked rows of -logp[row, label]. Throws InputError on an empty
/// mask or an out-of-range label.
Value nll_loss(const Value& logp, std::span<const int> labels, const std::vector<bool>& mask);

/// S[i][j] = <a_i, b_j> / (||a_i|| ||b_j|| + kCosineEps).
Value cosine_sim_matrix(const Value& a, const Value& b);

/// Column j of the result is updated(:, j) if keep[j], else previous(:, j).
Value select_columns(const Value& updated, const Value& previous, const std::vector<bool>& keep);

}  // namespace tsc::ad
