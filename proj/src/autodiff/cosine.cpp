#include "tsc/autodiff/cosine.hpp"

#include "tsc/autodiff/ops.hpp"

namespace tsc::ad {

CosineParts cosine_parts(const Matrix& a, const Matrix& b, bool self) {
  CosineParts p;
  p.norm_a = a.rowwise().norm();
  if (self) {
    p.norm_b = p.norm_a;
    p.sim = Matrix::Zero(a.rows(), a.rows());
    p.sim.selfadjointView<Eigen::Lower>().rankUpdate(a);
    p.sim.triangularView<Eigen::StrictlyUpper>() = p.sim.transpose();
  } else {
    p.norm_b = b.rowwise().norm();
    p.sim.noalias() = a * b.transpose();
  }
  for (Eigen::Index i = 0; i < p.sim.rows(); ++i) {
    p.sim.row(i).array() /= p.norm_a(i) * p.norm_b.transpose().array() + kCosineEps;
  }
  return p;
}

CosineGrad cosine_grad(const CosineParts& p, const Matrix& d_sim) {
  CosineGrad g;
  const Eigen::Index n = p.sim.rows();
  const Eigen::Index m = p.sim.cols();
  g.d_gram.resize(n, m);
  g.coef_a = Vector::Zero(n);
  g.coef_b = Vector::Zero(m);
  // S = G / (na nb^T + eps):  dG = dS / den,  dna_i = -sum_j dS_ij S_ij nb_j / den_ij.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double na = p.norm_a(i);
    const double* ds = d_sim.row(i).data();
    const double* s = p.sim.row(i).data();
    double* dg = g.d_gram.row(i).data();
    double acc_a = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double inv_den = 1.0 / (na * p.norm_b(j) + kCosineEps);
      dg[j] = ds[j] * inv_den;
      const double t = dg[j] * s[j];
      acc_a -= t * p.norm_b(j);
      g.coef_b(j) -= t * na;
    }
    g.coef_a(i) = acc_a;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    g.coef_a(i) = p.norm_a(i) > 0.0 ? g.coef_a(i) / p.norm_a(i) : 0.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    g.coef_b(j) = p.norm_b(j) > 0.0 ? g.coef_b(j) / p.norm_b(j) : 0.0;
  }
  return g;
}

}  // namespace tsc::ad
