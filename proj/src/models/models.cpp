#include "tsc/models/models.hpp"

#include <cmath>

#include "tsc/autodiff/ops.hpp"
#include "tsc/core/errors.hpp"
#include "tsc/masking/schedule.hpp"

namespace tsc {
namespace {

Matrix glorot(Index fan_in, Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
  }
  return w;
}

std::size_t expected_params(const ModelConfig& config) {
  return config.backbone == Backbone::sgc ? config.projector_layers + 2 : config.depth + 2;
}

void check_inputs(const ModelConfig& config, std::span<const ad::Value> params,
                  std::span<const ColumnMask> masks) {
  if (params.size() != expected_params(config)) {
    throw ConfigError("model: expected " + std::to_string(expected_params(config)) +
                      " parameter tensors, got " + std::to_string(params.size()));
  }
  if (masks.size() != config.depth) {
    throw ConfigError("model: need one column mask per layer");
  }
  for (const ColumnMask& m : masks) {
    if (m.size() != config.hidden_dim) throw ConfigError("model: mask width != hidden_dim");
  }
}

ad::Value classify(const ad::Value& h, const ad::Value& weight, const ad::Value& bias) {
  if (h.cols() != weight.rows()) throw ConfigError("classifier: weight rows != hidden_dim");
  return ad::add_row_bias(ad::matmul(h, weight), bias);
}

}  // namespace

const Matrix& ModelParams::at(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw InputError("no parameter named '" + std::string(name) + "'");
}

ModelParams init_params(const ModelConfig& config, Index num_features, Index num_classes,
                        Rng& init_rng) {
  config.validate();
  if (num_features < 1 || num_classes < 1) {
    throw ConfigError("init_params: need at least one feature and one class");
  }
  const Index d = config.hidden_dim;
  ModelParams p;
  auto push = [&p](std::string name, Matrix m) {
    p.names.push_back(std::move(name));
    p.values.push_back(std::move(m));
  };
  if (config.backbone == Backbone::sgc) {
    for (Index k = 0; k < config.projector_layers; ++k) {
      push("proj_" + std::to_string(k), glorot(k == 0 ? num_features : d, d, init_rng));
    }
  } else {
    push("w_in", glorot(num_features, d, init_rng));
    for (Index l = 2; l <= config.depth; ++l) push("w_" + std::to_string(l), glorot(d, d, init_rng));
  }
  push("cls_weight", glorot(d, num_classes, init_rng));
  push("cls_bias", Matrix::Zero(1, static_cast<Eigen::Index>(num_classes)));
  return p;
}

std::vector<ColumnMask> sample_masks(const ModelConfig& config, Rng& mask_rng) {
  std::vector<ColumnMask> masks;
  masks.reserve(config.depth);
  if (!config.use_masking) {
    masks.assign(config.depth, ColumnMask::all_keep(config.hidden_dim));
    return masks;
  }
  const MaskSchedule schedule(config.lambda, config.depth);
  for (Index l = 1; l <= config.depth; ++l) {
    masks.push_back(sample_mask(config.hidden_dim, schedule.freeze_prob(l), mask_rng,
                                config.guarantee_update));
  }
  return masks;
}

ForwardTrace snapshot(const TapeForward& forward) {
  ForwardTrace trace;
  trace.per_layer.reserve(forward.layers.size());
  for (const ad::Value& h : forward.layers) trace.per_layer.push_back(h.data());
  trace.logits = forward.logits.data();
  return trace;
}

ad::Value project_input(const ad::Value& features, const ad::Value& projection) {
  if (features.cols() != projection.rows()) {
    throw ConfigError("project_input: projection rows must equal the feature count");
  }
  return ad::matmul(features, projection);
}

TapeForward forward_sgc_tsc(const ad::Value& features, const SparseMatrix& propagation,
                            const ModelConfig& config, std::span<const ad::Value> params,
                            std::span<const ColumnMask> masks, bool training, Rng& dropout_rng) {
  check_inputs(config, params, masks);
  const Index k = config.projector_layers;
  ad::Value h = ad::dropout(features, config.effective_input_dropout(), training, dropout_rng);
  for (Index i = 0; i < k; ++i) {
    if (i > 0) h = ad::relu(h);
    h = project_input(h, params[i]);
  }
  TapeForward out;
  out.layers.reserve(config.depth + 1);
  out.layers.push_back(h);
  for (Index l = 1; l <= config.depth; ++l) {
    h = masked_propagate_sgc(propagation, h, masks[l - 1]);
    out.layers.push_back(h);
  }
  out.logits = classify(h, params[k], params[k + 1]);
  return out;
}

TapeForward forward_gcn_tsc(const ad::Value& features, const SparseMatrix& propagation,
                            const ModelConfig& config, std::span<const ad::Value> params,
                            std::span<const ColumnMask> masks, bool training, Rng& dropout_rng) {
  check_inputs(config, params, masks);
  const ad::Value x =
      ad::dropout(features, config.effective_input_dropout(), training, dropout_rng);
  if (x.cols() != params[0].rows()) throw ConfigError("gcn: w_in rows must equal feature count");
  TapeForward out;
  out.layers.reserve(config.depth + 1);
  ad::Value h = ad::matmul(x, params[0]);
  out.layers.push_back(h);
  h = ad::relu(ad::spmm_const(propagation, h));
  out.layers.push_back(h);
  for (Index l = 2; l <= config.depth; ++l) {
    h = masked_layer_gcn(propagation, h, params[l - 1], masks[l - 1]);
    out.layers.push_back(h);
  }
  const std::size_t head = config.depth;
  out.logits = classify(h, params[head], params[head + 1]);
  return out;
}

TapeForward forward_model(const ad::Value& features, const SparseMatrix& propagation,
                          const ModelConfig& config, std::span<const ad::Value> params,
                          std::span<const ColumnMask> masks, bool training, Rng& dropout_rng) {
  return config.backbone == Backbone::sgc
             ? forward_sgc_tsc(features, propagation, config, params, masks, training, dropout_rng)
             : forward_gcn_tsc(features, propagation, config, params, masks, training, dropout_rng);
}

ForwardTrace evaluate_model(const Matrix& features, const SparseMatrix& propagation,
                            const ModelConfig& config, const ModelParams& params,
                            std::span<const ColumnMask> masks) {
  ad::Tape tape;
  const ad::Value x = tape.constant(features);
  std::vector<ad::Value> leaves;
  leaves.reserve(params.size());
  for (const Matrix& m : params.values) leaves.push_back(tape.constant(m));
  Rng unused(0);
  return snapshot(forward_model(x, propagation, config, leaves, masks, false, unused));
}

LossParts total_loss(const TapeForward& forward, std::span<const int> labels,
                     const std::vector<bool>& train_mask, const ModelConfig& config,
                     Rng& view_rng, Rng* negative_rng) {
  LossParts parts;
  parts.classification = ad::nll_loss(ad::log_softmax_rows(forward.logits), labels, train_mask);
  parts.total = parts.classification;
  if (!config.use_contrastive) return parts;
  if (config.backbone == Backbone::sgc) {
    if (forward.layers.size() < 3) return parts;
    const std::span<const ad::Value> layers(forward.layers.begin() + 1, forward.layers.end());
    parts.contrastive = loss_sgc(layers, config.contrastive, negative_rng);
  } else {
    parts.contrastive = loss_gcn(forward.layers.back(), config.view_dropout, config.contrastive,
                                 view_rng, negative_rng);
  }
  parts.total =
      ad::add(parts.classification, ad::scale(parts.contrastive, config.contrastive.loss_weight));
  return parts;
}

}  // namespace tsc
