#include "tsc/models/model_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "tsc/core/errors.hpp"

namespace tsc {
namespace {

using nlohmann::json;

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p < 1.0; }

template <typename T>
T read(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: bad field '") + key + "': " + e.what());
  }
}

Index read_count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("model config: '") + key + "' must be a non-negative integer");
  }
  return v.get<Index>();
}

}  // namespace

double ModelConfig::effective_input_dropout() const {
  if (input_dropout) return *input_dropout;
  return backbone == Backbone::gcn ? 0.5 : 0.0;
}

MaskResample ModelConfig::effective_resample() const {
  if (resample_masks) return *resample_masks;
  return backbone == Backbone::gcn ? MaskResample::once : MaskResample::epoch;
}

std::string ModelConfig::name() const {
  std::string base = backbone == Backbone::gcn ? "GCN" : "SGC";
  if (use_masking && use_contrastive) return base + "+TSC";
  if (use_masking) return base + "+mask";
  if (use_contrastive) return base + "+cl";
  return base;
}

void ModelConfig::validate() const {
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be at least 1");
  if (projector_layers < 1) throw ConfigError("projector_layers must be at least 1");
  if (!is_probability(effective_input_dropout())) {
    throw ConfigError("input_dropout must lie in [0, 1)");
  }
  if (!is_probability(view_dropout)) throw ConfigError("view_dropout must lie in [0, 1)");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  contrastive.validate();
}

ModelConfig ModelConfig::preset(std::string_view name) {
  const std::string key = lower(name);
  ModelConfig c;
  if (key == "sgc" || key == "sgc+tsc") {
    c.backbone = Backbone::sgc;
  } else if (key == "gcn" || key == "gcn+tsc") {
    c.backbone = Backbone::gcn;
  } else {
    throw ConfigError("unknown model preset '" + std::string(name) + "'");
  }
  const bool tsc = key.ends_with("+tsc");
  c.use_masking = tsc;
  c.use_contrastive = tsc;
  return c;
}

std::string_view to_string(Backbone backbone) {
  return backbone == Backbone::gcn ? "gcn" : "sgc";
}

Backbone parse_backbone(std::string_view text) {
  const std::string key = lower(text);
  if (key == "sgc") return Backbone::sgc;
  if (key == "gcn") return Backbone::gcn;
  throw ConfigError("unknown backbone '" + std::string(text) + "'");
}

json to_json(const ModelConfig& c) {
  json doc = {
      {"backbone", to_string(c.backbone)},
      {"use_masking", c.use_masking},
      {"use_contrastive", c.use_contrastive},
      {"depth", c.depth},
      {"hidden_dim", c.hidden_dim},
      {"input_dropout", c.effective_input_dropout()},
      {"view_dropout", c.view_dropout},
      {"lambda", c.lambda},
      {"tau", c.contrastive.temperature},
      {"beta", c.contrastive.loss_weight},
      {"negative_cap", nullptr},
      {"projector_layers", c.projector_layers},
      {"resample_masks", c.effective_resample() == MaskResample::once ? "once" : "epoch"},
      {"guarantee_update", c.guarantee_update},
      {"seed", c.seed},
  };
  if (c.contrastive.negative_cap) doc["negative_cap"] = *c.contrastive.negative_cap;
  return doc;
}

ModelConfig model_config_from_json(const json& doc, ModelConfig c) {
  if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
  static const std::set<std::string> known = {
      "backbone", "use_masking", "use_contrastive", "depth", "hidden_dim",
      "input_dropout", "view_dropout", "lambda", "tau", "beta", "negative_cap",
      "projector_layers", "resample_masks", "guarantee_update", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("model config: unknown field '" + key + "'");
  }
  if (doc.contains("backbone")) c.backbone = parse_backbone(read<std::string>(doc, "backbone"));
  if (doc.contains("use_masking")) c.use_masking = read<bool>(doc, "use_masking");
  if (doc.contains("use_contrastive")) c.use_contrastive = read<bool>(doc, "use_contrastive");
  if (doc.contains("depth")) c.depth = read_count(doc, "depth");
  if (doc.contains("hidden_dim")) c.hidden_dim = read_count(doc, "hidden_dim");
  if (doc.contains("input_dropout") && !doc["input_dropout"].is_null()) {
    c.input_dropout = read<double>(doc, "input_dropout");
  }
  if (doc.contains("view_dropout")) c.view_dropout = read<double>(doc, "view_dropout");
  if (doc.contains("lambda")) c.lambda = read<double>(doc, "lambda");
  if (doc.contains("tau")) c.contrastive.temperature = read<double>(doc, "tau");
  if (doc.contains("beta")) c.contrastive.loss_weight = read<double>(doc, "beta");
  if (doc.contains("negative_cap")) {
    if (doc["negative_cap"].is_null()) {
      c.contrastive.negative_cap.reset();
    } else {
      c.contrastive.negative_cap = read_count(doc, "negative_cap");
    }
  }
  if (doc.contains("projector_layers")) c.projector_layers = read_count(doc, "projector_layers");
  if (doc.contains("resample_masks") && !doc["resample_masks"].is_null()) {
    const std::string mode = read<std::string>(doc, "resample_masks");
    if (mode == "epoch") {
      c.resample_masks = MaskResample::epoch;
    } else if (mode == "once") {
      c.resample_masks = MaskResample::once;
    } else {
      throw ConfigError("resample_masks must be 'epoch' or 'once'");
    }
  }
  if (doc.contains("guarantee_update")) c.guarantee_update = read<bool>(doc, "guarantee_update");
  if (doc.contains("seed")) c.seed = read<std::uint64_t>(doc, "seed");
  c.validate();
  return c;
}

}  // namespace tsc
