#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tsc/core/errors.hpp"
#include "tsc/graph/graph_ops.hpp"
#include "tsc/graph/sbm.hpp"
#include "tsc/metrics/metrics.hpp"

using namespace tsc;

namespace {

SparseMatrix triangle() { return build_adjacency(3, {{0, 1}, {0, 2}, {1, 2}}); }

}  // namespace

TEST_CASE("accuracy") {
  const std::vector<int> labels = {0, 1, 2, 1};
  const std::vector<bool> all(4, true);
  Matrix onehot = Matrix::Zero(4, 3);
  for (int i = 0; i < 4; ++i) onehot(i, labels[i]) = 1.0;
  CHECK(accuracy(onehot, labels, all) == 1.0);

  const std::vector<int> wrong = {1, 2, 0, 0};
  CHECK(accuracy(onehot, wrong, all) == 0.0);

  // Ties resolve to the lowest index.
  const Matrix flat = Matrix::Zero(4, 3);
  CHECK(accuracy(flat, labels, all) == doctest::Approx(0.25));

  const std::vector<bool> some = {true, false, false, true};
  Matrix mixed = onehot;
  mixed(3, 1) = -1.0;
  CHECK(accuracy(mixed, labels, some) == doctest::Approx(0.5));

  CHECK_THROWS_AS(accuracy(onehot, labels, std::vector<bool>(4, false)), InputError);
  CHECK_THROWS_AS(accuracy(onehot, std::vector<int>{0, 1}, all), InputError);

  SUBCASE("loop oracle") {
    std::mt19937_64 gen(11);
    const Matrix logits = oracle::random_matrix(50, 5, gen);
    std::vector<int> y(50);
    std::vector<bool> mask(50);
    for (int i = 0; i < 50; ++i) {
      y[i] = static_cast<int>(gen() % 5);
      mask[i] = gen() % 3 != 0;
    }
    double hit = 0.0, count = 0.0;
    for (int i = 0; i < 50; ++i) {
      if (!mask[i]) continue;
      int best = 0;
      for (int c = 1; c < 5; ++c) {
        if (logits(i, c) > logits(i, best)) best = c;
      }
      hit += best == y[i] ? 1.0 : 0.0;
      count += 1.0;
    }
    CHECK(accuracy(logits, y, mask) == doctest::Approx(hit / count).epsilon(1e-15));
  }
}

TEST_CASE("mad") {
  Matrix same(4, 3);
  same.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
  CHECK(mad(same) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(mad(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-15));

  Matrix opposite(2, 2);
  opposite << 1.0, 1.0, -1.0, -1.0;
  CHECK(mad(opposite) == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 gen(5);
  const Matrix h = oracle::random_matrix(5, 3, gen);
  CHECK(mad(h) == doctest::Approx(oracle::loop_mad(h)).epsilon(1e-12));

  SUBCASE("row scaling and permutation invariance") {
    Matrix scaled = h;
    for (Eigen::Index i = 0; i < h.rows(); ++i) scaled.row(i) *= 0.1 + 3.0 * i;
    CHECK(mad(scaled) == doctest::Approx(mad(h)).epsilon(1e-12));
    Matrix permuted = h;
    permuted.row(0) = h.row(4);
    permuted.row(4) = h.row(0);
    CHECK(mad(permuted) == doctest::Approx(mad(h)).epsilon(1e-12));
  }

  SUBCASE("zero rows sit at distance one") {
    Matrix z = oracle::random_matrix(6, 4, gen);
    z.row(2).setZero();
    z.row(5).setZero();
    CHECK(mad(z) == doctest::Approx(oracle::loop_mad(z)).epsilon(1e-12));
    CHECK(mad(Matrix::Zero(3, 2)) == doctest::Approx(1.0));
  }

  SUBCASE("larger random") {
    const Matrix big = oracle::random_matrix(60, 7, gen);
    CHECK(mad(big) == doctest::Approx(oracle::loop_mad(big)).epsilon(1e-11));
  }

  CHECK_THROWS_AS(mad(Matrix::Ones(1, 3)), InputError);
}

TEST_CASE("reachability patterns") {
  const SparseMatrix path = build_adjacency(4, {{0, 1}, {1, 2}, {2, 3}});
  auto r1 = reachability(path, 1);
  CHECK(r1[0] == std::vector<Index>{1});
  CHECK(r1[1] == std::vector<Index>{0, 2});
  auto r2 = reachability(path, 2);
  CHECK(r2[0] == std::vector<Index>{1, 2});
  CHECK(r2[1] == std::vector<Index>{0, 2, 3});
  auto s2 = reachability(path, 2, Reachability::strict);
  CHECK(s2[0] == std::vector<Index>{2});
  CHECK(s2[1] == std::vector<Index>{3});
  CHECK(s2[3] == std::vector<Index>{1});
  CHECK_THROWS_AS(reachability(path, 0), InputError);
}

TEST_CASE("amo") {
  const SparseMatrix empty = build_adjacency(5, {});
  CHECK(amo(empty, 1) == 0.0);
  CHECK(amo(empty, 4) == 0.0);

  // K3: each row of S has two ones, S S^T has 2 on the diagonal, 1 elsewhere.
  CHECK(amo(triangle(), 1) == doctest::Approx(12.0 / 9.0));
  CHECK(amo(triangle(), 1, Reachability::strict) == doctest::Approx(12.0 / 9.0));

  SUBCASE("non-decreasing with self-loops on an SBM") {
    const GraphDataset ds = generate_sbm(3, 20, 0.2, 0.02, 4, 7);
    const SparseMatrix a = build_adjacency(ds);
    double prev = 0.0;
    for (Index l = 1; l <= 6; ++l) {
      const double v = amo(a, l);
      CHECK(v >= prev);
      prev = v;
    }
  }

  SUBCASE("matches dense matrix powers") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 12; ++trial) {
      const Index n = 5 + static_cast<Index>(gen() % 26);
      const auto edges = oracle::random_connected_graph(n, 0.08, gen);
      const SparseMatrix a = build_adjacency(n, edges);
      const Matrix dense = oracle::dense_adjacency(n, edges);
      for (Index l = 1; l <= 6; ++l) {
        for (bool strict : {false, true}) {
          const auto mode = strict ? Reachability::strict : Reachability::with_self_loops;
          CHECK(amo(a, l, mode) == oracle::dense_amo(dense, l, strict));
        }
      }
    }
  }
}

TEST_CASE("andcnn") {
  const std::vector<int> labels = {0, 0, 1};
  // Pairs (0,2), (2,0), (1,2), (2,1) cross labels.
  CHECK(andcnn(triangle(), labels, 1) == doctest::Approx(4.0 / 3.0));
  CHECK(andcnn(triangle(), std::vector<int>{2, 2, 2}, 3) == 0.0);

  const SparseMatrix cliques = build_adjacency(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
  const std::vector<int> block = {0, 0, 0, 1, 1, 1};
  for (Index l = 1; l <= 4; ++l) CHECK(andcnn(cliques, block, l) == 0.0);

  CHECK_THROWS_AS(andcnn(triangle(), std::vector<int>{0, 1}, 1), InputError);

  SUBCASE("grows with order on an SBM") {
    const GraphDataset ds = generate_sbm(3, 20, 0.2, 0.02, 4, 9);
    const SparseMatrix a = build_adjacency(ds);
    CHECK(andcnn(a, ds.labels, 3) > andcnn(a, ds.labels, 1));
  }

  SUBCASE("matches dense matrix powers") {
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 12; ++trial) {
      const Index n = 5 + static_cast<Index>(gen() % 26);
      const auto edges = oracle::random_connected_graph(n, 0.08, gen);
      std::vector<int> y(n);
      for (auto& v : y) v = static_cast<int>(gen() % 3);
      const SparseMatrix a = build_adjacency(n, edges);
      const Matrix dense = oracle::dense_adjacency(n, edges);
      for (Index l = 1; l <= 6; ++l) {
        for (bool strict : {false, true}) {
          const auto mode = strict ? Reachability::strict : Reachability::with_self_loops;
          CHECK(andcnn(a, y, l, mode) == oracle::dense_andcnn(dense, y, l, strict));
        }
      }
    }
  }
}

TEST_CASE("metric report") {
  MetricReport report;
  report.accuracy = 0.5;
  report.mad_per_layer = {0.9, 0.4};
  const std::vector<Index> orders = {1, 2};
  fill_neighbor_metrics(report, triangle(), std::vector<int>{0, 0, 1}, orders);
  REQUIRE(report.amo_per_order.size() == 2);
  CHECK(report.andcnn_per_order[0] == doctest::Approx(4.0 / 3.0));
  const auto j = to_json(report);
  CHECK(j.at("accuracy").get<double>() == 0.5);
  CHECK(j.at("mad_per_layer").size() == 2);
  CHECK(j.at("orders").size() == 2);
}
