#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tsc/contrastive/contrastive.hpp"
#include "tsc/core/matrix.hpp"

namespace tsc {

enum class Backbone { sgc, gcn };

/// When column masks are redrawn during training.
enum class MaskResample { epoch, once };

struct ModelConfig {
  Backbone backbone = Backbone::sgc;
  bool use_masking = true;
  bool use_contrastive = true;
  Index depth = 2;
  Index hidden_dim = 256;
  /// Unset: 0 for SGC, 0.5 for GCN.
  std::optional<double> input_dropout;
  /// Rate of the two dropout views in the GCN contrastive term.
  double view_dropout = 0.5;
  double lambda = 0.5;
  ContrastiveConfig contrastive;  // tau, beta and the negative cap
  /// Linear maps in the SGC input projector; relu between consecutive maps.
  Index projector_layers = 1;
  /// Unset: every epoch for SGC, once per run for GCN.
  std::optional<MaskResample> resample_masks;
  bool guarantee_update = true;
  std::uint64_t seed = 0;

  double effective_input_dropout() const;
  MaskResample effective_resample() const;
  /// "SGC", "SGC+TSC", "GCN", "GCN+TSC", or "<backbone>+mask" /
  /// "<backbone>+cl" for single-sided variants.
  std::string name() const;
  /// Throws ConfigError.
  void validate() const;

  /// Presets by name: sgc, sgc+tsc, gcn, gcn+tsc (case-insensitive).
  static ModelConfig preset(std::string_view name);
};

std::string_view to_string(Backbone backbone);
Backbone parse_backbone(std::string_view text);

/// Field names: backbone, use_masking, use_contrastive, depth, hidden_dim,
/// input_dropout, view_dropout, lambda, tau, beta, negative_cap,
/// projector_layers, resample_masks, guarantee_update, seed. Missing fields
/// keep their defaults; unknown fields are a ConfigError.
nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& doc, ModelConfig base = {});

}  // namespace tsc
