#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsc/autodiff/adam.hpp"
#include "tsc/graph/sbm.hpp"
#include "tsc/models/model_config.hpp"

namespace tsc {

struct SweepAxes {
  std::optional<std::vector<Index>> depth;
  std::optional<std::vector<double>> lambda;
  std::optional<std::vector<double>> tau;
  std::optional<std::vector<double>> beta;
};

struct RunConfig {
  /// Portable JSON dataset. Unset: generate `synthetic`.
  std::optional<std::filesystem::path> dataset_path;
  SbmParams synthetic;
  bool row_normalize = true;

  ModelConfig model;
  /// Model presets compared by a depth sweep (sgc, sgc+tsc, gcn, gcn+tsc),
  /// each applied on top of `model`. Empty: `model` alone.
  std::vector<std::string> models;
  ad::AdamOptions optimizer;

  Index epochs = 200;
  Index eval_every = 1;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  SweepAxes sweep;
  std::filesystem::path output_dir = "runs";
  std::vector<Index> metric_orders = {1, 2, 3};
  /// Layers whose representations are written as CSV after training.
  std::vector<Index> dump_layers;
  Index workers = 1;

  /// Exact contrastive denominators are only used up to this many nodes when
  /// no negative cap is set; larger graphs fall back to `auto_negative_cap`
  /// unless force_exact is set.
  Index exact_node_limit = 5000;
  Index auto_negative_cap = 512;
  bool force_exact = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Field names mirror RunConfig. `model` takes the ModelConfig fields,
/// `optimizer` takes learning_rate, beta1, beta2, epsilon, weight_decay, and
/// `synthetic` takes the SbmParams fields. Unknown fields are a ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// `base` with the backbone and TSC switches of a named preset.
ModelConfig apply_preset(const ModelConfig& base, const std::string& preset);
/// One model config per entry of config.models (or config.model alone).
std::vector<ModelConfig> sweep_models(const RunConfig& config);

}  // namespace tsc
