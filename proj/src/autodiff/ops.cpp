#include "tsc/autodiff/ops.hpp"

#include <cmath>
#include <string>

#include "tsc/autodiff/cosine.hpp"
#include "tsc/core/errors.hpp"

namespace tsc::ad {
namespace {

std::string shape(const Value& v) {
  return std::to_string(v.rows()) + "x" + std::to_string(v.cols());
}

void require_same_shape(const Value& a, const Value& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

Value matmul(const Value& a, const Value& b) {
  if (a.cols() != b.rows()) {
    throw InputError("matmul: inner dimensions differ, " + shape(a) + " * " + shape(b));
  }
  Matrix out = a.data() * b.data();
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (a.requires_grad()) t.grad_for_update(a).noalias() += g * b.data().transpose();
    if (b.requires_grad()) t.grad_for_update(b).noalias() += a.data().transpose() * g;
  });
}

Value add(const Value& a, const Value& b) {
  require_same_shape(a, b, "add");
  return a.tape().record(a.data() + b.data(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Value sub(const Value& a, const Value& b) {
  require_same_shape(a, b, "sub");
  return a.tape().record(a.data() - b.data(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (b.requires_grad()) t.grad_for_update(b) -= g;
  });
}

Value add_row_bias(const Value& a, const Value& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw InputError("add_row_bias: bias must be 1x" + std::to_string(a.cols()) + ", got " +
                     shape(bias));
  }
  Matrix out = a.data().rowwise() + bias.data().row(0);
  return a.tape().record(std::move(out), {a, bias}, [a, bias](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (bias.requires_grad()) t.grad_for_update(bias) += g.colwise().sum();
  });
}

Value hadamard(const Value& a, const Value& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a.data().cwiseProduct(b.data());
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (a.requires_grad()) t.grad_for_update(a) += g.cwiseProduct(b.data());
    if (b.requires_grad()) t.grad_for_update(b) += g.cwiseProduct(a.data());
  });
}

Value scale(const Value& a, double factor) {
  return a.tape().record(a.data() * factor, {a}, [a, factor](Tape& t, const Matrix& g) {
    if (a.requires_grad()) t.grad_for_update(a) += factor * g;
  });
}

Value sum(const Value& a) {
  Matrix out(1, 1);
  out(0, 0) = a.data().sum();
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    if (a.requires_grad()) t.grad_for_update(a).array() += g(0, 0);
  });
}

Value spmm_const(const SparseMatrix& propagation, const Value& h) {
  Matrix out = spmm(propagation, h.data());
  const SparseMatrix* p = &propagation;
  return h.tape().record(std::move(out), {h}, [p, h](Tape& t, const Matrix& g) {
    if (!h.requires_grad()) return;
    Matrix& dh = t.grad_for_update(h);
    // dh += L^T g, scattered row by row.
    for (Index r = 0; r < p->rows(); ++r) {
      const auto cols = p->row_cols(r);
      const auto vals = p->row_values(r);
      const auto g_row = g.row(static_cast<Eigen::Index>(r));
      for (Index k = 0; k < cols.size(); ++k) {
        dh.row(static_cast<Eigen::Index>(cols[k])) += vals[k] * g_row;
      }
    }
  });
}

Value relu(const Value& x) {
  Matrix out = x.data().cwiseMax(0.0);
  return x.tape().record(std::move(out), {x}, [x](Tape& t, const Matrix& g) {
    if (!x.requires_grad()) return;
    t.grad_for_update(x) += (x.data().array() > 0.0).select(g, 0.0).matrix();
  });
}

Value dropout(const Value& x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InputError("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  double* m = mask.data();
  for (Eigen::Index k = 0; k < mask.size(); ++k) {
    m[k] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  Matrix out = x.data().cwiseProduct(mask);
  return x.tape().record(std::move(out), {x},
                         [x, mask = std::move(mask)](Tape& t, const Matrix& g) {
                           if (x.requires_grad()) t.grad_for_update(x) += g.cwiseProduct(mask);
                         });
}

Value log_softmax_rows(const Value& x) {
  const Matrix& in = x.data();
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mx = in.row(r).maxCoeff();
    const double lse = mx + std::log((in.row(r).array() - mx).exp().sum());
    out.row(r) = in.row(r).array() - lse;
  }
  Matrix probs = out.array().exp();
  return x.tape().record(std::move(out), {x},
                         [x, probs = std::move(probs)](Tape& t, const Matrix& g) {
                           if (!x.requires_grad()) return;
                           const Vector row_sums = g.rowwise().sum();
                           Matrix dx = g;
                           for (Eigen::Index r = 0; r < dx.rows(); ++r) {
                             dx.row(r) -= row_sums(r) * probs.row(r);
                           }
                           t.accumulate(x, dx);
                         });
}

Value nll_loss(const Value& logp, std::span<const int> labels, const std::vector<bool>& mask) {
  const auto n = static_cast<std::size_t>(logp.rows());
  if (labels.size() != n || mask.size() != n) {
    throw InputError("nll_loss: labels and mask must have one entry per row");
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> picks;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || labels[i] >= logp.cols()) {
      throw InputError("nll_loss: label out of range at row " + std::to_string(i));
    }
    picks.emplace_back(static_cast<Eigen::Index>(i), labels[i]);
  }
  if (picks.empty()) throw InputError("nll_loss: mask selects no rows");
  const double inv = 1.0 / static_cast<double>(picks.size());
  double total = 0.0;
  for (const auto& [r, c] : picks) total -= logp.data()(r, c);
  Matrix out(1, 1);
  out(0, 0) = total * inv;
  return logp.tape().record(std::move(out), {logp},
                            [logp, picks = std::move(picks), inv](Tape& t, const Matrix& g) {
                              if (!logp.requires_grad()) return;
                              Matrix& d = t.grad_for_update(logp);
                              for (const auto& [r, c] : picks) d(r, c) -= g(0, 0) * inv;
                            });
}

Value cosine_sim_matrix(const Value& a, const Value& b) {
  if (a.cols() != b.cols()) {
    throw InputError("cosine_sim_matrix: column counts differ, " + shape(a) + " vs " + shape(b));
  }
  CosineParts parts = cosine_parts(a.data(), b.data());
  Matrix sim = parts.sim;
  return a.tape().record(std::move(sim), {a, b},
                         [a, b, parts = std::move(parts)](Tape& t, const Matrix& g) {
                           const CosineGrad cg = cosine_grad(parts, g);
                           if (a.requires_grad()) {
                             Matrix da = cg.d_gram * b.data();
                             da += cg.coef_a.asDiagonal() * a.data();
                             t.accumulate(a, da);
                           }
                           if (b.requires_grad()) {
                             Matrix db = cg.d_gram.transpose() * a.data();
                             db += cg.coef_b.asDiagonal() * b.data();
                             t.accumulate(b, db);
                           }
                         });
}

Value select_columns(const Value& updated, const Value& previous, const std::vector<bool>& keep) {
  require_same_shape(updated, previous, "select_columns");
  if (keep.size() != static_cast<std::size_t>(updated.cols())) {
    throw InputError("select_columns: mask length " + std::to_string(keep.size()) +
                     " does not match " + std::to_string(updated.cols()) + " columns");
  }
  Matrix out = previous.data();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (keep[static_cast<std::size_t>(j)]) out.col(j) = updated.data().col(j);
  }
  return updated.tape().record(
      std::move(out), {updated, previous}, [updated, previous, keep](Tape& t, const Matrix& g) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          const Value& target = keep[static_cast<std::size_t>(j)] ? updated : previous;
          if (target.requires_grad()) t.grad_for_update(target).col(j) += g.col(j);
        }
      });
}

}  // namespace tsc::ad
