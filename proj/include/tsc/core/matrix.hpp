#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace tsc {

/// Dense row-major matrix of 64-bit reals. Rows are nodes throughout the
/// library, so row-major keeps per-node vectors contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Index = std::size_t;

}  // namespace tsc
