#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tsc/autodiff/adam.hpp"
#include "tsc/autodiff/grad_check.hpp"
#include "tsc/autodiff/ops.hpp"
#include "tsc/core/errors.hpp"
#include "tsc/graph/graph_ops.hpp"

using namespace tsc;
using ad::Tape;
using ad::Value;

namespace {

Matrix away_from_zero(Matrix m, double band) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    double& v = m.data()[k];
    if (std::abs(v) < band) v = v < 0 ? -band - 0.1 : band + 0.1;
  }
  return m;
}

// Weighted sum so every output coordinate gets a distinct upstream gradient.
Value weighted_sum(const Value& v, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return ad::sum(ad::hadamard(v, v.tape().constant(oracle::random_matrix(v.rows(), v.cols(), gen))));
}

}  // namespace

TEST_CASE("matmul") {
  SUBCASE("identity times M, gradient of the sum is all ones") {
    Tape t;
    std::mt19937_64 gen(1);
    const Value id = t.constant(Matrix::Identity(3, 3));
    const Value m = t.leaf(oracle::random_matrix(3, 2, gen), true);
    const Value p = ad::matmul(id, m);
    CHECK(p.data() == m.data());
    t.backward(ad::sum(p));
    CHECK(m.grad() == Matrix::Ones(3, 2));
  }
  SUBCASE("scalar product rule") {
    Tape t;
    const Value a = t.leaf(Matrix::Constant(1, 1, 3.0), true);
    const Value b = t.leaf(Matrix::Constant(1, 1, -2.0), true);
    t.backward(ad::matmul(a, b));
    CHECK(a.grad()(0, 0) == -2.0);
    CHECK(b.grad()(0, 0) == 3.0);
  }
  SUBCASE("finite differences") {
    std::mt19937_64 gen(2);
    const auto r = ad::grad_check(
        [](Tape&, const std::vector<Value>& p) { return weighted_sum(ad::matmul(p[0], p[1]), 7); },
        {oracle::random_matrix(4, 3, gen), oracle::random_matrix(3, 2, gen)});
    CHECK(r.max_rel_error < 1e-6);
  }
  SUBCASE("shape mismatch") {
    Tape t;
    CHECK_THROWS_AS(ad::matmul(t.constant(Matrix::Zero(2, 3)), t.constant(Matrix::Zero(2, 3))),
                    InputError);
    CHECK_THROWS_AS(ad::add(t.constant(Matrix::Zero(2, 3)), t.constant(Matrix::Zero(3, 2))),
                    InputError);
  }
}

TEST_CASE("elementwise ops and bias") {
  std::mt19937_64 gen(3);
  const auto r = ad::grad_check(
      [](Tape&, const std::vector<Value>& p) {
        const Value x = ad::hadamard(ad::add(p[0], p[1]), ad::sub(p[0], ad::scale(p[1], 0.5)));
        return weighted_sum(ad::add_row_bias(x, p[2]), 4);
      },
      {oracle::random_matrix(3, 4, gen), oracle::random_matrix(3, 4, gen),
       oracle::random_matrix(1, 4, gen)});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("spmm_const") {
  std::mt19937_64 gen(4);
  SUBCASE("identity passthrough") {
    Tape t;
    const SparseMatrix id = SparseMatrix::identity(3);
    const Value h = t.leaf(oracle::random_matrix(3, 2, gen), true);
    const Value y = ad::spmm_const(id, h);
    CHECK(y.data() == h.data());
    t.backward(ad::sum(y));
    CHECK(h.grad() == Matrix::Ones(3, 2));
  }
  SUBCASE("two-node path") {
    Tape t;
    const SparseMatrix l = normalize_sym(build_adjacency(2, {{0, 1}}));
    Matrix x(2, 1);
    x << 1, 0;
    const Value y = ad::spmm_const(l, t.constant(x));
    CHECK(y.data()(0, 0) == doctest::Approx(0.5));
    CHECK(y.data()(1, 0) == doctest::Approx(0.5));
  }
  SUBCASE("matches the dense matmul node") {
    const auto edges = oracle::random_connected_graph(7, 0.3, gen);
    const SparseMatrix l = normalize_sym(build_adjacency(7, edges));
    const Matrix h0 = oracle::random_matrix(7, 3, gen);
    Tape ts, td;
    const Value hs = ts.leaf(h0, true);
    const Value hd = td.leaf(h0, true);
    const Value ys = ad::spmm_const(l, hs);
    const Value yd = ad::matmul(td.constant(l.to_dense()), hd);
    CHECK((ys.data() - yd.data()).cwiseAbs().maxCoeff() < 1e-10);
    ts.backward(weighted_sum(ys, 5));
    td.backward(weighted_sum(yd, 5));
    CHECK((hs.grad() - hd.grad()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("relu") {
  std::mt19937_64 gen(6);
  Tape t;
  const Value neg = t.leaf(Matrix::Constant(2, 2, -1.0), true);
  const Value pos = t.leaf(Matrix::Constant(2, 2, 2.0), true);
  const Value zero = t.leaf(Matrix::Zero(1, 1), true);
  const Value yn = ad::relu(neg);
  const Value yp = ad::relu(pos);
  CHECK(yn.data().isZero());
  CHECK(yp.data() == pos.data());
  t.backward(ad::add(ad::add(ad::sum(yn), ad::sum(yp)), ad::sum(ad::relu(zero))));
  CHECK(neg.grad().isZero());
  CHECK(pos.grad() == Matrix::Ones(2, 2));
  CHECK(zero.grad()(0, 0) == 0.0);

  const auto r = ad::grad_check(
      [](Tape&, const std::vector<Value>& p) { return weighted_sum(ad::relu(p[0]), 8); },
      {away_from_zero(oracle::random_matrix(5, 4, gen), 1e-3)});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("dropout") {
  Rng rng(10);
  Tape t;
  std::mt19937_64 gen(11);
  const Value x = t.leaf(oracle::random_matrix(4, 4, gen), true);
  CHECK(ad::dropout(x, 0.0, true, rng).data() == x.data());
  CHECK(ad::dropout(x, 0.9, false, rng).data() == x.data());
  CHECK_THROWS_AS(ad::dropout(x, 1.0, true, rng), InputError);
  CHECK_THROWS_AS(ad::dropout(x, -0.1, true, rng), InputError);

  SUBCASE("two calls draw different masks") {
    const Matrix a = ad::dropout(x, 0.5, true, rng).data();
    const Matrix b = ad::dropout(x, 0.5, true, rng).data();
    CHECK(a != b);
  }
  SUBCASE("binomial statistics at rate 0.5") {
    const Index n = 100000;
    Tape big;
    const Matrix ones = Matrix::Ones(1, n);
    const Matrix out = ad::dropout(big.constant(ones), 0.5, true, rng).data();
    Index kept = 0;
    for (Index k = 0; k < n; ++k) kept += out(0, k) != 0.0;
    const double sd = std::sqrt(n * 0.25);
    CHECK(std::abs(kept - n * 0.5) < 3 * sd);
    // Output entries are 0 or 2, so the mean has standard deviation 1/sqrt(n).
    CHECK(std::abs(out.mean() - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("gradient uses the same mask") {
    const Value y = ad::dropout(x, 0.3, true, rng);
    t.backward(ad::sum(y));
    for (Eigen::Index k = 0; k < x.data().size(); ++k) {
      const double scale = y.data().data()[k] / x.data().data()[k];
      CHECK(x.grad().data()[k] == doctest::Approx(scale));
    }
  }
}

TEST_CASE("log_softmax and nll") {
  std::mt19937_64 gen(12);
  SUBCASE("rows of exp(log_softmax) sum to one") {
    Tape t;
    const Value lp = ad::log_softmax_rows(t.constant(oracle::random_matrix(6, 5, gen) * 30.0));
    const Vector sums = lp.data().array().exp().rowwise().sum();
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(sums(i) - 1.0) < 1e-9);
  }
  SUBCASE("uniform logits give ln C") {
    Tape t;
    const std::vector<int> labels = {0, 1, 2};
    const Value loss = ad::nll_loss(ad::log_softmax_rows(t.constant(Matrix::Zero(3, 4))), labels,
                                    {true, true, true});
    CHECK(loss.item() == doctest::Approx(std::log(4.0)));
  }
  SUBCASE("confident correct logits give a vanishing loss") {
    Tape t;
    Matrix logits = Matrix::Zero(2, 3);
    logits(0, 1) = 50.0;
    logits(1, 2) = 50.0;
    const std::vector<int> labels = {1, 2};
    const Value loss =
        ad::nll_loss(ad::log_softmax_rows(t.constant(logits)), labels, {true, true});
    CHECK(loss.item() < 1e-20);
  }
  SUBCASE("finite differences on a masked 6x4 instance") {
    const std::vector<int> labels = {0, 3, 1, 2, 2, 0};
    const std::vector<bool> mask = {true, false, true, true, false, true};
    const auto r = ad::grad_check(
        [&](Tape&, const std::vector<Value>& p) {
          return ad::nll_loss(ad::log_softmax_rows(p[0]), labels, mask);
        },
        {oracle::random_matrix(6, 4, gen)});
    CHECK(r.max_rel_error < 1e-6);
  }
  SUBCASE("errors") {
    Tape t;
    const Value lp = ad::log_softmax_rows(t.constant(Matrix::Zero(2, 2)));
    const std::vector<int> labels = {0, 1};
    CHECK_THROWS_AS(ad::nll_loss(lp, labels, {false, false}), InputError);
    const std::vector<int> bad = {0, 2};
    CHECK_THROWS_AS(ad::nll_loss(lp, bad, {true, true}), InputError);
  }
}

TEST_CASE("cosine_sim_matrix") {
  std::mt19937_64 gen(13);
  SUBCASE("unit rows against themselves") {
    Tape t;
    Matrix a = oracle::random_matrix(4, 3, gen);
    a.rowwise().normalize();
    const Value s = ad::cosine_sim_matrix(t.constant(a), t.constant(a));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(s.data()(i, i) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal rows") {
    Tape t;
    const Value s = ad::cosine_sim_matrix(t.constant(Matrix::Identity(3, 3)),
                                          t.constant(Matrix::Identity(3, 3)));
    CHECK(s.data()(0, 1) == 0.0);
    CHECK(s.data()(2, 0) == 0.0);
  }
  SUBCASE("values in [-1, 1] and a zero row") {
    Tape t;
    Matrix a = oracle::random_matrix(8, 5, gen);
    a.row(3).setZero();
    const Value s = ad::cosine_sim_matrix(t.constant(a), t.constant(oracle::random_matrix(6, 5, gen)));
    CHECK(s.data().maxCoeff() <= 1.0 + 1e-9);
    CHECK(s.data().minCoeff() >= -1.0 - 1e-9);
    CHECK(s.data().row(3).isZero());
  }
  SUBCASE("finite differences through both arguments") {
    const auto r = ad::grad_check(
        [](Tape&, const std::vector<Value>& p) { return weighted_sum(ad::cosine_sim_matrix(p[0], p[1]), 9); },
        {oracle::random_matrix(3, 5, gen), oracle::random_matrix(4, 5, gen)});
    CHECK(r.max_rel_error < 1e-5);
  }
  SUBCASE("same value on both sides") {
    const auto r = ad::grad_check(
        [](Tape&, const std::vector<Value>& p) { return weighted_sum(ad::cosine_sim_matrix(p[0], p[0]), 10); },
        {oracle::random_matrix(4, 3, gen)});
    CHECK(r.max_rel_error < 1e-5);
  }
}

TEST_CASE("select_columns") {
  std::mt19937_64 gen(14);
  const std::vector<bool> keep = {true, false, true};
  const auto r = ad::grad_check(
      [&](Tape&, const std::vector<Value>& p) {
        return weighted_sum(ad::select_columns(ad::scale(p[0], 2.0), p[1], keep), 11);
      },
      {oracle::random_matrix(4, 3, gen), oracle::random_matrix(4, 3, gen)});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad_check on a linear loss is exact") {
  std::mt19937_64 gen(15);
  const auto r = ad::grad_check([](Tape&, const std::vector<Value>& p) { return ad::sum(p[0]); },
                                {oracle::random_matrix(3, 3, gen)});
  CHECK(r.max_rel_error < 1e-9);
}

TEST_CASE("backward runs once per tape and needs a scalar root") {
  Tape t;
  const Value x = t.leaf(Matrix::Ones(2, 2), true);
  CHECK_THROWS(t.backward(x));
  const Value s = ad::sum(x);
  t.backward(s);
  CHECK_THROWS(t.backward(s));
}

TEST_CASE("forward passes are deterministic under equal seeds") {
  std::mt19937_64 gen(16);
  const Matrix x0 = oracle::random_matrix(5, 5, gen);
  auto run = [&] {
    Tape t;
    Rng rng = Rng::derive(3, "dropout");
    return ad::dropout(ad::relu(t.constant(x0)), 0.4, true, rng).data();
  };
  CHECK(run() == run());
}

TEST_CASE("adam") {
  SUBCASE("zero gradient without weight decay leaves parameters unchanged") {
    std::vector<Matrix> params = {Matrix::Constant(2, 2, 0.7)};
    const std::vector<Matrix> grads = {Matrix::Zero(2, 2)};
    ad::AdamOptions o;
    o.weight_decay = 0.0;
    ad::AdamState state(o, params);
    for (int k = 0; k < 3; ++k) ad::adam_step(params, grads, state);
    CHECK(params[0] == Matrix::Constant(2, 2, 0.7));
    CHECK(state.step_count() == 3);
  }
  SUBCASE("first step moves by lr * g / (|g| + eps)") {
    for (double g : {1e-6, 0.3, 250.0}) {
      std::vector<Matrix> params = {Matrix::Constant(1, 1, 1.0)};
      ad::AdamOptions o;
      o.weight_decay = 0.0;
      ad::AdamState state(o, params);
      ad::adam_step(params, std::vector<Matrix>{Matrix::Constant(1, 1, g)}, state);
      CHECK(1.0 - params[0](0, 0) == doctest::Approx(0.01 * g / (g + 1e-8)).epsilon(1e-9));
    }
  }
  SUBCASE("ten steps on x^2/2 follow a scalar reference") {
    ad::AdamOptions o;
    o.weight_decay = 5e-4;
    // Scalar reference written independently of the library.
    double x = 1.0, m = 0.0, v = 0.0;
    std::vector<double> trace;
    for (int t = 1; t <= 10; ++t) {
      const double g = x + o.weight_decay * x;
      m = o.beta1 * m + (1 - o.beta1) * g;
      v = o.beta2 * v + (1 - o.beta2) * g * g;
      const double mh = m / (1 - std::pow(o.beta1, t));
      const double vh = v / (1 - std::pow(o.beta2, t));
      x -= o.learning_rate * mh / (std::sqrt(vh) + o.epsilon);
      trace.push_back(x);
    }
    std::vector<Matrix> params = {Matrix::Constant(1, 1, 1.0)};
    ad::AdamState state(o, params);
    for (int t = 0; t < 10; ++t) {
      ad::adam_step(params, std::vector<Matrix>{params[0]}, state);
      CHECK(std::abs(params[0](0, 0) - trace[t]) < 1e-12);
    }
  }
  SUBCASE("non-finite gradient is rejected before any update") {
    std::vector<Matrix> params = {Matrix::Ones(1, 2), Matrix::Ones(1, 1)};
    ad::AdamState state({}, params);
    Matrix bad = Matrix::Zero(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(ad::adam_step(params, std::vector<Matrix>{Matrix::Ones(1, 2), bad}, state),
                    TrainingError);
    CHECK(params[0] == Matrix::Ones(1, 2));
    CHECK(state.step_count() == 0);
  }
}
