#include "tsc/runner/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "tsc/core/errors.hpp"

namespace tsc {
namespace {

using nlohmann::json;

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* what) {
  if (!doc.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      throw ConfigError(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
void read_into(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: bad field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional_list(const json& doc, const char* key, std::optional<std::vector<T>>& out) {
  if (!doc.contains(key) || doc.at(key).is_null()) return;
  std::vector<T> values;
  read_into(doc, key, values);
  out = std::move(values);
}

SbmParams sbm_from_json(const json& doc) {
  reject_unknown(doc,
                 {"blocks", "nodes_per_block", "p_in", "p_out", "feature_dim", "seed", "signal",
                  "noise", "train_per_class", "max_test"},
                 "synthetic");
  SbmParams p;
  read_into(doc, "blocks", p.blocks);
  read_into(doc, "nodes_per_block", p.nodes_per_block);
  read_into(doc, "p_in", p.p_in);
  read_into(doc, "p_out", p.p_out);
  read_into(doc, "feature_dim", p.feature_dim);
  read_into(doc, "seed", p.seed);
  read_into(doc, "signal", p.signal);
  read_into(doc, "noise", p.noise);
  read_into(doc, "train_per_class", p.train_per_class);
  read_into(doc, "max_test", p.max_test);
  return p;
}

json sbm_to_json(const SbmParams& p) {
  return {{"blocks", p.blocks},          {"nodes_per_block", p.nodes_per_block},
          {"p_in", p.p_in},              {"p_out", p.p_out},
          {"feature_dim", p.feature_dim}, {"seed", p.seed},
          {"signal", p.signal},          {"noise", p.noise},
          {"train_per_class", p.train_per_class}, {"max_test", p.max_test}};
}

ad::AdamOptions optimizer_from_json(const json& doc) {
  reject_unknown(doc, {"learning_rate", "beta1", "beta2", "epsilon", "weight_decay"},
                 "optimizer");
  ad::AdamOptions o;
  read_into(doc, "learning_rate", o.learning_rate);
  read_into(doc, "beta1", o.beta1);
  read_into(doc, "beta2", o.beta2);
  read_into(doc, "epsilon", o.epsilon);
  read_into(doc, "weight_decay", o.weight_decay);
  return o;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (auto_negative_cap < 1) throw ConfigError("auto_negative_cap must be at least 1");
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) ||
      !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(optimizer.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(optimizer.weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  auto non_empty = [](const auto& axis, const char* name) {
    if (axis && axis->empty()) throw ConfigError(std::string("sweep axis '") + name + "' is empty");
  };
  non_empty(sweep.depth, "depth");
  non_empty(sweep.lambda, "lambda");
  non_empty(sweep.tau, "tau");
  non_empty(sweep.beta, "beta");
  if (sweep.depth) {
    for (std::size_t i = 1; i < sweep.depth->size(); ++i) {
      if ((*sweep.depth)[i] <= (*sweep.depth)[i - 1]) {
        throw ConfigError("sweep depths must be strictly ascending");
      }
    }
    for (Index d : *sweep.depth) {
      if (d < 1) throw ConfigError("sweep depths must be at least 1");
    }
  }
  for (Index l : metric_orders) {
    if (l < 1) throw ConfigError("metric orders must be at least 1");
  }
  for (const std::string& m : models) (void)ModelConfig::preset(m);
}

RunConfig run_config_from_json(const json& doc) {
  reject_unknown(doc,
                 {"dataset_path", "synthetic", "row_normalize", "model", "models", "optimizer",
                  "epochs", "eval_every", "seeds", "sweep", "output_dir", "metric_orders",
                  "dump_layers", "workers", "exact_node_limit", "auto_negative_cap",
                  "force_exact"},
                 "run config");
  RunConfig c;
  if (doc.contains("dataset_path") && !doc["dataset_path"].is_null()) {
    std::string path;
    read_into(doc, "dataset_path", path);
    c.dataset_path = path;
  }
  if (doc.contains("synthetic")) c.synthetic = sbm_from_json(doc["synthetic"]);
  read_into(doc, "row_normalize", c.row_normalize);
  if (doc.contains("model")) c.model = model_config_from_json(doc["model"]);
  read_into(doc, "models", c.models);
  if (doc.contains("optimizer")) c.optimizer = optimizer_from_json(doc["optimizer"]);
  read_into(doc, "epochs", c.epochs);
  read_into(doc, "eval_every", c.eval_every);
  read_into(doc, "seeds", c.seeds);
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    reject_unknown(s, {"depth", "lambda", "tau", "beta"}, "sweep");
    read_optional_list(s, "depth", c.sweep.depth);
    read_optional_list(s, "lambda", c.sweep.lambda);
    read_optional_list(s, "tau", c.sweep.tau);
    read_optional_list(s, "beta", c.sweep.beta);
  }
  if (doc.contains("output_dir")) {
    std::string dir;
    read_into(doc, "output_dir", dir);
    c.output_dir = dir;
  }
  read_into(doc, "metric_orders", c.metric_orders);
  read_into(doc, "dump_layers", c.dump_layers);
  read_into(doc, "workers", c.workers);
  read_into(doc, "exact_node_limit", c.exact_node_limit);
  read_into(doc, "auto_negative_cap", c.auto_negative_cap);
  read_into(doc, "force_exact", c.force_exact);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(doc);
}

json to_json(const RunConfig& c) {
  json sweep = json::object();
  if (c.sweep.depth) sweep["depth"] = *c.sweep.depth;
  if (c.sweep.lambda) sweep["lambda"] = *c.sweep.lambda;
  if (c.sweep.tau) sweep["tau"] = *c.sweep.tau;
  if (c.sweep.beta) sweep["beta"] = *c.sweep.beta;
  json doc = {
      {"dataset_path", c.dataset_path ? json(c.dataset_path->string()) : json(nullptr)},
      {"synthetic", sbm_to_json(c.synthetic)},
      {"row_normalize", c.row_normalize},
      {"model", to_json(c.model)},
      {"models", c.models},
      {"optimizer",
       {{"learning_rate", c.optimizer.learning_rate},
        {"beta1", c.optimizer.beta1},
        {"beta2", c.optimizer.beta2},
        {"epsilon", c.optimizer.epsilon},
        {"weight_decay", c.optimizer.weight_decay}}},
      {"epochs", c.epochs},
      {"eval_every", c.eval_every},
      {"seeds", c.seeds},
      {"sweep", sweep},
      {"output_dir", c.output_dir.string()},
      {"metric_orders", c.metric_orders},
      {"dump_layers", c.dump_layers},
      {"workers", c.workers},
      {"exact_node_limit", c.exact_node_limit},
      {"auto_negative_cap", c.auto_negative_cap},
      {"force_exact", c.force_exact},
  };
  return doc;
}

ModelConfig apply_preset(const ModelConfig& base, const std::string& preset) {
  const ModelConfig p = ModelConfig::preset(preset);
  ModelConfig out = base;
  if (out.backbone != p.backbone) {
    out.input_dropout.reset();
    out.resample_masks.reset();
  }
  out.backbone = p.backbone;
  out.use_masking = p.use_masking;
  out.use_contrastive = p.use_contrastive;
  return out;
}

std::vector<ModelConfig> sweep_models(const RunConfig& config) {
  if (config.models.empty()) return {config.model};
  std::vector<ModelConfig> out;
  for (const std::string& m : config.models) out.push_back(apply_preset(config.model, m));
  return out;
}

}  // namespace tsc
