#include "tsc/autodiff/tape.hpp"

#include "tsc/core/errors.hpp"

namespace tsc::ad {

const Matrix& Value::data() const { return tape_->node(id_).data; }

const Matrix& Value::grad() const {
  const auto& n = tape_->node(id_);
  if (n.grad.size() == 0 && n.data.size() != 0) {
    n.grad = Matrix::Zero(n.data.rows(), n.data.cols());
  }
  return n.grad;
}

bool Value::requires_grad() const { return tape_->node(id_).requires_grad; }

double Value::item() const {
  const Matrix& d = data();
  if (d.rows() != 1 || d.cols() != 1) throw InputError("item() needs a 1x1 value");
  return d(0, 0);
}

Value Tape::leaf(Matrix data, bool requires_grad) {
  Node n;
  if (requires_grad) n.grad = Matrix::Zero(data.rows(), data.cols());
  n.data = std::move(data);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Value(this, nodes_.size() - 1);
}

Value Tape::record(Matrix data, std::initializer_list<Value> parents, BackwardFn backward) {
  bool needs = false;
  for (const Value& p : parents) {
    if (p.tape_ != this) throw InputError("op mixes values from different tapes");
    needs = needs || p.requires_grad();
  }
  Node n;
  if (needs) {
    n.grad = Matrix::Zero(data.rows(), data.cols());
    n.backward = std::move(backward);
  }
  n.data = std::move(data);
  n.requires_grad = needs;
  nodes_.push_back(std::move(n));
  return Value(this, nodes_.size() - 1);
}

void Tape::accumulate(const Value& target, const Matrix& contribution) {
  Node& n = nodes_[target.id_];
  if (!n.requires_grad) return;
  n.grad += contribution;
  n.touched = true;
}

Matrix& Tape::grad_for_update(const Value& target) {
  Node& n = nodes_[target.id_];
  if (!n.requires_grad) throw InputError("grad_for_update on a value without gradient");
  n.touched = true;
  return n.grad;
}

void Tape::backward(const Value& root) {
  if (root.tape_ != this) throw InputError("backward root belongs to another tape");
  if (backward_done_) throw InputError("backward already ran on this tape");
  Node& r = nodes_[root.id_];
  if (r.data.rows() != 1 || r.data.cols() != 1) {
    throw InputError("backward root must be a 1x1 value");
  }
  backward_done_ = true;
  if (!r.requires_grad) return;
  r.grad(0, 0) = 1.0;
  r.touched = true;
  for (std::size_t id = root.id_ + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.backward && n.touched) n.backward(*this, n.grad);
    n.backward = nullptr;  // releases whatever the closure captured
  }
}

}  // namespace tsc::ad
