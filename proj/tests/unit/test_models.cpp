#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tsc/autodiff/grad_check.hpp"
#include "tsc/autodiff/ops.hpp"
#include "tsc/contrastive/contrastive.hpp"
#include "tsc/core/errors.hpp"
#include "tsc/graph/graph_ops.hpp"
#include "tsc/graph/sbm.hpp"
#include "tsc/models/checkpoint.hpp"
#include "tsc/models/models.hpp"

using namespace tsc;
using ad::Tape;
using ad::Value;

namespace {

struct Fixture {
  GraphDataset ds = generate_sbm(2, 3, 0.9, 0.2, 4, 3);
  SparseMatrix l = normalize_sym(build_adjacency(ds));
};

ModelConfig small(Backbone b, bool tsc, Index depth) {
  ModelConfig c = ModelConfig::preset(b == Backbone::sgc ? (tsc ? "sgc+tsc" : "sgc")
                                                         : (tsc ? "gcn+tsc" : "gcn"));
  c.depth = depth;
  c.hidden_dim = 4;
  return c;
}

std::vector<Value> leaves(Tape& t, const std::vector<Matrix>& params) {
  std::vector<Value> out;
  for (const Matrix& m : params) out.push_back(t.leaf(m, true));
  return out;
}

}  // namespace

TEST_CASE("model config") {
  CHECK(ModelConfig::preset("SGC+TSC").name() == "SGC+TSC");
  CHECK(ModelConfig::preset("gcn").name() == "GCN");
  CHECK_THROWS_AS(ModelConfig::preset("gat"), ConfigError);
  CHECK(ModelConfig::preset("gcn").effective_input_dropout() == 0.5);
  CHECK(ModelConfig::preset("sgc").effective_input_dropout() == 0.0);
  CHECK(ModelConfig::preset("gcn+tsc").effective_resample() == MaskResample::once);
  CHECK(ModelConfig::preset("sgc+tsc").effective_resample() == MaskResample::epoch);
  ModelConfig c;
  c.depth = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.input_dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  SUBCASE("json round trip") {
    ModelConfig m = ModelConfig::preset("gcn+tsc");
    m.depth = 7;
    m.lambda = 0.3;
    m.contrastive.temperature = 0.4;
    m.contrastive.negative_cap = 64;
    m.resample_masks = MaskResample::epoch;
    const ModelConfig back = model_config_from_json(to_json(m));
    CHECK(to_json(back) == to_json(m));
    CHECK_THROWS_AS(model_config_from_json({{"depht", 3}}), ConfigError);
    CHECK_THROWS_AS(model_config_from_json({{"tau", -1.0}}), ConfigError);
  }
}

TEST_CASE("init_params is deterministic and shaped by backbone") {
  Rng a(1), b(1);
  const ModelConfig sgc = small(Backbone::sgc, true, 3);
  const ModelParams p = init_params(sgc, 10, 3, a);
  const ModelParams q = init_params(sgc, 10, 3, b);
  CHECK(p.values == q.values);
  CHECK(p.names == std::vector<std::string>{"proj_0", "cls_weight", "cls_bias"});
  CHECK(p.at("proj_0").rows() == 10);
  CHECK(p.at("cls_bias").isZero());
  const double limit = std::sqrt(6.0 / 14.0);
  CHECK(p.at("proj_0").cwiseAbs().maxCoeff() <= limit);

  Rng c(1);
  const ModelParams g = init_params(small(Backbone::gcn, false, 4), 10, 3, c);
  CHECK(g.names == std::vector<std::string>{"w_in", "w_2", "w_3", "w_4", "cls_weight", "cls_bias"});
  CHECK(g.at("w_3").rows() == 4);
  CHECK(g.at("w_3").cols() == 4);
}

TEST_CASE("project_input") {
  Tape t;
  std::mt19937_64 gen(1);
  const Matrix x = oracle::random_matrix(5, 3, gen);
  CHECK(project_input(t.constant(x), t.constant(Matrix::Identity(3, 3))).data() == x);
  CHECK(project_input(t.constant(x), t.constant(Matrix::Zero(3, 2))).data().isZero());
  CHECK_THROWS_AS(project_input(t.constant(x), t.constant(Matrix::Zero(4, 2))), ConfigError);
}

TEST_CASE("SGC forward") {
  Fixture f;
  SUBCASE("without masking and with identity projection it is plain propagation") {
    ModelConfig c = small(Backbone::sgc, false, 3);
    Rng init(2), masks(3), drop(4);
    ModelParams p = init_params(c, 4, 2, init);
    p.values[0] = Matrix::Identity(4, 4);
    Tape t;
    const TapeForward fw = forward_sgc_tsc(t.constant(f.ds.features), f.l, c, leaves(t, p.values),
                                           sample_masks(c, masks), true, drop);
    REQUIRE(fw.layers.size() == 4);
    for (Index k = 0; k <= 3; ++k) {
      CHECK((fw.layers[k].data() - propagate_power(f.l, f.ds.features, k)).cwiseAbs().maxCoeff() <
            1e-14);
    }
    CHECK(fw.logits.rows() == 6);
  }
  SUBCASE("depth 1 aggregates everything") {
    ModelConfig c = small(Backbone::sgc, true, 1);
    c.lambda = 0.01;
    Rng masks(3);
    const auto m = sample_masks(c, masks);
    CHECK(m.size() == 1);
    CHECK(m[0].kept_count() == 4);
  }
}

TEST_CASE("GCN forward") {
  Fixture f;
  SUBCASE("depth 2 without masking is the standard layer stack") {
    ModelConfig c = small(Backbone::gcn, false, 2);
    c.input_dropout = 0.0;
    Rng init(2), masks(3), drop(4);
    const ModelParams p = init_params(c, 4, 2, init);
    const ForwardTrace trace = evaluate_model(f.ds.features, f.l, c, p, sample_masks(c, masks));
    const Matrix ld = f.l.to_dense();
    const Matrix h1 = (ld * f.ds.features * p.at("w_in")).cwiseMax(0.0);
    const Matrix h2 = (ld * h1 * p.at("w_2")).cwiseMax(0.0);
    const Matrix logits = (h2 * p.at("cls_weight")).rowwise() + p.at("cls_bias").row(0);
    CHECK((trace.per_layer[2] - h2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((trace.logits - logits).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("frozen deep layers pass layer 2 through") {
    ModelConfig c = small(Backbone::gcn, true, 6);
    Rng init(2);
    const ModelParams p = init_params(c, 4, 2, init);
    std::vector<ColumnMask> masks(6, ColumnMask::all_keep(4));
    for (Index l = 3; l <= 6; ++l) masks[l - 1] = ColumnMask{std::vector<bool>(4, false)};
    const ForwardTrace trace = evaluate_model(f.ds.features, f.l, c, p, masks);
    CHECK(trace.per_layer[6] == trace.per_layer[2]);
    CHECK(trace.per_layer.size() == 7);
  }
}

TEST_CASE("full loss gradients on a 6-node SBM graph") {
  Fixture f;
  for (Backbone b : {Backbone::sgc, Backbone::gcn}) {
    ModelConfig c = small(b, true, 4);
    c.lambda = 0.3;
    Rng init(5), mask_rng(6);
    const ModelParams p = init_params(c, 4, 2, init);
    const auto masks = sample_masks(c, mask_rng);
    const auto r = ad::grad_check(
        [&](Tape& t, const std::vector<Value>& params) {
          Rng drop(7), views(8);
          const TapeForward fw =
              forward_model(t.constant(f.ds.features), f.l, c, params, masks, true, drop);
          return total_loss(fw, f.ds.labels, f.ds.train_mask, c, views).total;
        },
        p.values);
    CHECK_MESSAGE(r.max_rel_error < 1e-4, to_string(b));
  }
}

TEST_CASE("total_loss composition") {
  Fixture f;
  for (Backbone b : {Backbone::sgc, Backbone::gcn}) {
    ModelConfig c = small(b, true, 3);
    Rng init(5), mask_rng(6);
    const ModelParams p = init_params(c, 4, 2, init);
    const auto masks = sample_masks(c, mask_rng);
    auto evaluate = [&](const ModelConfig& cfg) {
      Tape t;
      Rng drop(7), views(8);
      std::vector<Value> ps;
      for (const Matrix& m : p.values) ps.push_back(t.constant(m));
      const TapeForward fw = forward_model(t.constant(f.ds.features), f.l, cfg, ps, masks, true, drop);
      const LossParts parts = total_loss(fw, f.ds.labels, f.ds.train_mask, cfg, views);
      // Component oracle computed separately.
      const Matrix logp = ad::log_softmax_rows(t.constant(fw.logits.data())).data();
      double ce = 0.0;
      Index count = 0;
      for (Index i = 0; i < f.ds.num_nodes; ++i) {
        if (!f.ds.train_mask[i]) continue;
        ce -= logp(i, f.ds.labels[i]);
        ++count;
      }
      ce /= count;
      double contrastive = 0.0;
      if (cfg.use_contrastive) {
        if (b == Backbone::sgc) {
          std::vector<Matrix> layers;
          for (std::size_t k = 1; k < fw.layers.size(); ++k) layers.push_back(fw.layers[k].data());
          contrastive = oracle::layer_loss(layers, cfg.contrastive.temperature);
        } else {
          CHECK(parts.contrastive.valid());
          contrastive = parts.contrastive.item();
        }
      }
      return std::pair{parts.total.item(), ce + cfg.contrastive.loss_weight * contrastive};
    };
    const auto [total, expected] = evaluate(c);
    CHECK(std::abs(total - expected) < 1e-12 * std::max(1.0, std::abs(expected)));

    ModelConfig zero = c;
    zero.contrastive.loss_weight = 0.0;
    ModelConfig off = c;
    off.use_contrastive = false;
    CHECK(evaluate(zero).first == evaluate(off).first);
  }
}

TEST_CASE("switching TSC off reduces to the plain backbones") {
  Fixture f;
  ModelConfig plain = small(Backbone::gcn, false, 5);
  ModelConfig tsc_off = small(Backbone::gcn, true, 5);
  tsc_off.use_masking = false;
  tsc_off.use_contrastive = false;
  Rng i1(3), i2(3), m1(4), m2(4);
  const ModelParams p1 = init_params(plain, 4, 2, i1);
  const ModelParams p2 = init_params(tsc_off, 4, 2, i2);
  CHECK(p1.values == p2.values);
  const auto t1 = evaluate_model(f.ds.features, f.l, plain, p1, sample_masks(plain, m1));
  const auto t2 = evaluate_model(f.ds.features, f.l, tsc_off, p2, sample_masks(tsc_off, m2));
  CHECK(t1.logits == t2.logits);
}

TEST_CASE("checkpoints") {
  const auto dir = std::filesystem::temp_directory_path() / "tsc_test_models";
  std::filesystem::create_directories(dir);
  Rng init(9);
  const ModelParams p = init_params(small(Backbone::gcn, true, 3), 5, 3, init);
  save_checkpoint(p, dir / "m.ckpt");
  const ModelParams back = load_checkpoint(dir / "m.ckpt");
  CHECK(back.names == p.names);
  CHECK(back.values == p.values);

  {
    std::ifstream in(dir / "m.ckpt", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream(dir / "short.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "short.ckpt"), IoError);
  std::ofstream(dir / "junk.ckpt") << "not json\n";
  CHECK_THROWS_AS(load_checkpoint(dir / "junk.ckpt"), IoError);
  CHECK_THROWS_AS(load_checkpoint(dir / "absent.ckpt"), IoError);
  std::filesystem::remove_all(dir);
}
