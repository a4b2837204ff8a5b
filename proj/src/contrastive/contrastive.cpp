#include "tsc/contrastive/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "tsc/autodiff/cosine.hpp"
#include "tsc/autodiff/ops.hpp"
#include "tsc/core/errors.hpp"

namespace tsc {
namespace {

// Above this many bytes of similarity matrices per loss, the backward pass
// recomputes them instead of holding them on the tape.
constexpr double kSimilarityCacheBytes = 1.5 * 1024.0 * 1024.0 * 1024.0;

double bytes_for_pairs(Eigen::Index n, std::size_t pairs) {
  return 2.0 * 8.0 * static_cast<double>(n) * static_cast<double>(n) *
         static_cast<double>(pairs);
}

using RowMap = Eigen::Map<const Eigen::ArrayXd>;

// Max and sum of e^{x/tau - shift} over a row with entry i left out.
double max_except(const RowMap& r, Eigen::Index i) {
  double mx = -std::numeric_limits<double>::infinity();
  const Eigen::Index tail = r.size() - i - 1;
  if (i > 0) mx = r.head(i).maxCoeff();
  if (tail > 0) mx = std::max(mx, r.tail(tail).maxCoeff());
  return mx;
}

double sum_exp_except(const RowMap& r, Eigen::Index i, double inv_tau, double shift) {
  double z = 0.0;
  const Eigen::Index tail = r.size() - i - 1;
  if (i > 0) z += (r.head(i) * inv_tau - shift).exp().sum();
  if (tail > 0) z += (r.tail(tail) * inv_tau - shift).exp().sum();
  return z;
}

// log sum_{j != i} (e^{self_ij/tau} + e^{cross_ij/tau}), max-shifted.
double row_lse(const double* self_row, const double* cross_row, Eigen::Index n, Eigen::Index i,
               double inv_tau) {
  const RowMap s(self_row, n);
  const RowMap c(cross_row, n);
  const double mx = std::max(max_except(s, i), max_except(c, i)) * inv_tau;
  return mx + std::log(sum_exp_except(s, i, inv_tau, mx) + sum_exp_except(c, i, inv_tau, mx));
}

// Overwrites parts.sim with dL/dG (G the raw Gram matrix) for
//   dL/dS_ij = scale * e^{S_ij/tau - lse_i} (j != i),  dL/dS_ii = diag,
// and returns the row-norm coefficients (see CosineGrad).
void gram_grad_inplace(ad::CosineParts& parts, double scale, double inv_tau, const Vector& lse,
                       double diag, Vector& coef_a, Vector& coef_b) {
  const Eigen::Index n = parts.sim.rows();
  const Eigen::Index m = parts.sim.cols();
  coef_a = Vector::Zero(n);
  coef_b = Vector::Zero(m);
  const auto nb = parts.norm_b.array();
  Eigen::ArrayXd dg(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double na = parts.norm_a(i);
    Eigen::Map<Eigen::ArrayXd> row(parts.sim.row(i).data(), m);
    dg = scale * (row * inv_tau - lse(i)).exp() / (na * nb + ad::kCosineEps);
    dg(i) = diag / (na * nb(i) + ad::kCosineEps);
    coef_a(i) = -(dg * row * nb).sum();
    coef_b.array() -= na * dg * row;
    row = dg;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    coef_a(i) = parts.norm_a(i) > 0.0 ? coef_a(i) / parts.norm_a(i) : 0.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    coef_b(j) = parts.norm_b(j) > 0.0 ? coef_b(j) / parts.norm_b(j) : 0.0;
  }
}

struct ExactState {
  ad::CosineParts self;   // cos(anchor, anchor)
  ad::CosineParts cross;  // cos(anchor, other)
  Vector lse;
  bool cached = true;
};

ad::Value exact_pair_loss(const ad::Value& anchor, const ad::Value& other, double tau,
                          bool cache) {
  const Eigen::Index n = anchor.rows();
  const double inv_tau = 1.0 / tau;
  auto st = std::make_shared<ExactState>();
  st->self = ad::cosine_parts(anchor.data(), anchor.data(), true);
  st->cross = ad::cosine_parts(anchor.data(), other.data());
  st->lse.resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* self_row = st->self.sim.row(i).data();
    const double* cross_row = st->cross.sim.row(i).data();
    st->lse(i) = row_lse(self_row, cross_row, n, i, inv_tau);
    total += st->lse(i) - cross_row[i] * inv_tau;
  }
  if (!cache) {
    st->cached = false;
    st->self = {};
    st->cross = {};
  }

  Matrix out(1, 1);
  out(0, 0) = total;
  return anchor.tape().record(
      std::move(out), {anchor, other}, [anchor, other, inv_tau, st](ad::Tape& t, const Matrix& g) {
        if (!st->cached) {
          st->self = ad::cosine_parts(anchor.data(), anchor.data(), true);
          st->cross = ad::cosine_parts(anchor.data(), other.data());
        }
        const double up = g(0, 0);
        const Vector& lse = st->lse;
        Vector self_a, self_b, cross_a, cross_b;
        const double w = up * inv_tau;
        gram_grad_inplace(st->self, w, inv_tau, lse, 0.0, self_a, self_b);
        gram_grad_inplace(st->cross, w, inv_tau, lse, -w, cross_a, cross_b);

        Matrix& d_self = st->self.sim;
        const Eigen::Index n = d_self.rows();
        // Anchor sits on both sides of the self Gram matrix.
        for (Eigen::Index i = 0; i < n; ++i) {
          d_self(i, i) *= 2.0;
          for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = d_self(i, j) + d_self(j, i);
            d_self(i, j) = v;
            d_self(j, i) = v;
          }
        }
        const Matrix& d_cross = st->cross.sim;
        if (anchor.requires_grad()) {
          Matrix da = d_self * anchor.data();
          da.noalias() += d_cross * other.data();
          da += (self_a + self_b + cross_a).asDiagonal() * anchor.data();
          t.accumulate(anchor, da);
        }
        if (other.requires_grad()) {
          Matrix db = d_cross.transpose() * anchor.data();
          db += cross_b.asDiagonal() * other.data();
          t.accumulate(other, db);
        }
        st->self = {};
        st->cross = {};
      });
}

struct PairSim {
  double s = 0.0;
  double den = 0.0;
};

PairSim pair_cosine(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j,
                    const Vector& na, const Vector& nb) {
  PairSim p;
  p.den = na(i) * nb(j) + ad::kCosineEps;
  p.s = a.row(i).dot(b.row(j)) / p.den;
  return p;
}

// du += ds * d cos(u, v) / du
void add_pair_grad(Matrix& du, const Matrix& a, Eigen::Index i, const Matrix& b,
                   Eigen::Index j, const Vector& na, const Vector& nb, const PairSim& p,
                   double ds) {
  du.row(i) += (ds / p.den) * b.row(j);
  if (na(i) > 0.0) du.row(i) -= (ds * p.s * nb(j) / (p.den * na(i))) * a.row(i);
}

ad::Value sampled_pair_loss(const ad::Value& anchor, const ad::Value& other, double tau,
                            Index cap, Rng& rng) {
  const Eigen::Index n = anchor.rows();
  const double inv_tau = 1.0 / tau;
  const Matrix& a = anchor.data();
  const Matrix& b = other.data();
  const Vector na = a.rowwise().norm();
  const Vector nb = b.rowwise().norm();
  const double log_scale =
      std::log(static_cast<double>(n - 1) / static_cast<double>(cap));

  auto samples = std::make_shared<std::vector<Eigen::Index>>(static_cast<std::size_t>(n) * cap);
  auto lse = std::make_shared<Vector>(n);
  double total = 0.0;
  std::vector<double> sv(2 * cap);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < cap; ++k) {
      auto j = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      (*samples)[static_cast<std::size_t>(i) * cap + k] = j;
      sv[2 * k] = pair_cosine(a, i, a, j, na, na).s * inv_tau;
      sv[2 * k + 1] = pair_cosine(a, i, b, j, na, nb).s * inv_tau;
      mx = std::max({mx, sv[2 * k], sv[2 * k + 1]});
    }
    double z = 0.0;
    for (double v : sv) z += std::exp(v - mx);
    (*lse)(i) = mx + std::log(z);
    total += log_scale + (*lse)(i) - pair_cosine(a, i, b, i, na, nb).s * inv_tau;
  }

  Matrix out(1, 1);
  out(0, 0) = total;
  return anchor.tape().record(
      std::move(out), {anchor, other},
      [anchor, other, inv_tau, cap, samples, lse, na, nb](ad::Tape& t, const Matrix& g) {
        const Matrix& a = anchor.data();
        const Matrix& b = other.data();
        const double up = g(0, 0);
        Matrix da = Matrix::Zero(a.rows(), a.cols());
        Matrix db = Matrix::Zero(b.rows(), b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const PairSim pos = pair_cosine(a, i, b, i, na, nb);
          add_pair_grad(da, a, i, b, i, na, nb, pos, -up * inv_tau);
          add_pair_grad(db, b, i, a, i, nb, na, PairSim{pos.s, pos.den}, -up * inv_tau);
          for (Index k = 0; k < cap; ++k) {
            const Eigen::Index j = (*samples)[static_cast<std::size_t>(i) * cap + k];
            const PairSim ps = pair_cosine(a, i, a, j, na, na);
            const PairSim pc = pair_cosine(a, i, b, j, na, nb);
            const double ws = up * inv_tau * std::exp(ps.s * inv_tau - (*lse)(i));
            const double wc = up * inv_tau * std::exp(pc.s * inv_tau - (*lse)(i));
            add_pair_grad(da, a, i, a, j, na, na, ps, ws);
            add_pair_grad(da, a, j, a, i, na, na, ps, ws);
            add_pair_grad(da, a, i, b, j, na, nb, pc, wc);
            add_pair_grad(db, b, j, a, i, nb, na, pc, wc);
          }
        }
        t.accumulate(anchor, da);
        t.accumulate(other, db);
      });
}

void check_pair(const ad::Value& anchor, const ad::Value& other) {
  if (anchor.rows() != other.rows() || anchor.cols() != other.cols()) {
    throw InputError("contrastive loss: representations must share a shape");
  }
  if (anchor.rows() < 2) throw InputError("contrastive loss: need at least two nodes");
}

ad::Value pair_loss(const ad::Value& anchor, const ad::Value& other,
                    const ContrastiveConfig& config, Rng* negative_rng, bool cache) {
  check_pair(anchor, other);
  const auto n = static_cast<Index>(anchor.rows());
  if (config.negative_cap && *config.negative_cap < n - 1) {
    if (!negative_rng) throw InputError("contrastive loss: negative sampling needs an rng");
    return sampled_pair_loss(anchor, other, config.temperature, *config.negative_cap,
                             *negative_rng);
  }
  return exact_pair_loss(anchor, other, config.temperature, cache);
}

}  // namespace

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("contrastive temperature must be positive");
  }
  if (!(loss_weight >= 0.0) || !std::isfinite(loss_weight)) {
    throw ConfigError("contrastive loss weight must be non-negative");
  }
  if (negative_cap && *negative_cap == 0) {
    throw ConfigError("negative_cap must be at least 1");
  }
}

ad::Value contrastive_pair_loss(const ad::Value& anchor, const ad::Value& other,
                                const ContrastiveConfig& config, Rng* negative_rng) {
  config.validate();
  check_pair(anchor, other);
  return pair_loss(anchor, other, config, negative_rng,
                   bytes_for_pairs(anchor.rows(), 1) <= kSimilarityCacheBytes);
}

ad::Value loss_sgc(std::span<const ad::Value> layers, const ContrastiveConfig& config,
                   Rng* negative_rng) {
  config.validate();
  if (layers.size() < 2) throw InputError("loss_sgc: need at least two layers");
  const bool cache =
      bytes_for_pairs(layers[0].rows(), layers.size() - 1) <= kSimilarityCacheBytes;
  ad::Value total;
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    ad::Value term = pair_loss(layers[k + 1], layers[k], config, negative_rng, cache);
    total = total.valid() ? ad::add(total, term) : term;
  }
  return total;
}

ad::Value loss_gcn(const ad::Value& h_final, double dropout_rate, const ContrastiveConfig& config,
                   Rng& view_rng, Rng* negative_rng) {
  config.validate();
  const ad::Value first = ad::dropout(h_final, dropout_rate, true, view_rng);
  const ad::Value second = ad::dropout(h_final, dropout_rate, true, view_rng);
  return contrastive_pair_loss(first, second, config, negative_rng);
}

Decomposition decompose(const Matrix& h_next, const Matrix& h_prev, Index node, double tau) {
  if (h_next.rows() != h_prev.rows() || h_next.cols() != h_prev.cols()) {
    throw InputError("decompose: representations must share a shape");
  }
  const Eigen::Index n = h_next.rows();
  const auto i = static_cast<Eigen::Index>(node);
  if (i >= n) throw InputError("decompose: node out of range");
  if (n < 2) throw InputError("decompose: need at least two nodes");
  const Vector nn = h_next.rowwise().norm();
  const Vector np = h_prev.rowwise().norm();
  std::vector<double> self_row(n), cross_row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    self_row[j] = pair_cosine(h_next, i, h_next, j, nn, nn).s;
    cross_row[j] = pair_cosine(h_next, i, h_prev, j, nn, np).s;
  }
  Decomposition d;
  d.align = cross_row[i] / tau;
  d.heter = row_lse(self_row.data(), cross_row.data(), n, i, 1.0 / tau);
  return d;
}

std::vector<Decomposition> decompose_all(const Matrix& h_next, const Matrix& h_prev, double tau) {
  std::vector<Decomposition> out;
  out.reserve(static_cast<std::size_t>(h_next.rows()));
  for (Eigen::Index i = 0; i < h_next.rows(); ++i) {
    out.push_back(decompose(h_next, h_prev, static_cast<Index>(i), tau));
  }
  return out;
}

}  // namespace tsc
