#pragma once

#include <deque>
#include <functional>
#include <initializer_list>

#include "tsc/core/matrix.hpp"

namespace tsc::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while its tape lives.
class Value {
 public:
  Value() = default;

  const Matrix& data() const;
  /// Same shape as data(); zero until backward() accumulates into it.
  const Matrix& grad() const;
  Eigen::Index rows() const { return data().rows(); }
  Eigen::Index cols() const { return data().cols(); }
  bool requires_grad() const;

  std::size_t id() const { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const { return tape_ != nullptr; }

  /// Scalar payload of a 1x1 value.
  double item() const;

 private:
  friend class Tape;
  Value(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Receives the gradient of the op output and pushes contributions into the
/// op inputs through Tape::accumulate.
using BackwardFn = std::function<void(Tape&, const Matrix& out_grad)>;

/// Reverse-mode computation graph. Nodes are appended in evaluation order, so
/// node ids are already a topological order and backward() walks them in
/// reverse. A tape is single-threaded and supports one backward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Value leaf(Matrix data, bool requires_grad = false);
  Value constant(Matrix data) { return leaf(std::move(data), false); }

  /// Adds an op output. The backward closure is kept only when some parent
  /// requires a gradient.
  Value record(Matrix data, std::initializer_list<Value> parents, BackwardFn backward);

  /// grad(target) += contribution; ignored when target needs no gradient.
  void accumulate(const Value& target, const Matrix& contribution);
  /// Direct access for ops that scatter into a parent gradient. Only valid
  /// when target.requires_grad().
  Matrix& grad_for_update(const Value& target);

  /// Seeds d(root)/d(root) = 1 and propagates. root must be 1x1.
  void backward(const Value& root);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Value;

  struct Node {
    Matrix data;
    mutable Matrix grad;
    bool requires_grad = false;
    bool touched = false;
    BackwardFn backward;
  };

  const Node& node(std::size_t id) const { return nodes_[id]; }

  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace tsc::ad
