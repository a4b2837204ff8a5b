#include "tsc/runner/trainer.hpp"

#include <chrono>
#include <cmath>

#include "tsc/autodiff/adam.hpp"
#include "tsc/core/errors.hpp"
#include "tsc/graph/dataset_io.hpp"
#include "tsc/graph/graph_ops.hpp"
#include "tsc/graph/sbm.hpp"
#include "tsc/runner/embeddings.hpp"

namespace tsc {

PreparedData prepare_data(const RunConfig& config) {
  PreparedData data;
  if (config.dataset_path) {
    data.dataset = load_dataset(*config.dataset_path, &data.warnings);
    data.source = config.dataset_path->string();
  } else {
    data.dataset = generate_sbm(config.synthetic);
    data.source = "sbm";
  }
  if (config.row_normalize) {
    row_normalize(data.dataset.features);
    data.row_normalized = true;
  }
  data.adjacency = build_adjacency(data.dataset);
  data.propagation = normalize_sym(data.adjacency);
  return data;
}

ContrastiveConfig resolve_negatives(const RunConfig& config, Index num_nodes) {
  ContrastiveConfig c = config.model.contrastive;
  if (!c.negative_cap && num_nodes > config.exact_node_limit && !config.force_exact) {
    c.negative_cap = config.auto_negative_cap;
  }
  return c;
}

RunReport train_model(const RunConfig& config, const PreparedData& data, std::uint64_t seed,
                      TrainedModel* trained) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const GraphDataset& ds = data.dataset;

  ModelConfig model = config.model;
  model.seed = seed;
  model.contrastive = resolve_negatives(config, ds.num_nodes);

  RunConfig resolved = config;
  resolved.model = model;
  resolved.seeds = {seed};

  RunReport report;
  report.config = to_json(resolved);
  report.model_name = model.name();
  report.seed = seed;
  report.depth = model.depth;
  report.row_normalized = data.row_normalized;
  const bool sampled = model.contrastive.negative_cap &&
                       *model.contrastive.negative_cap + 1 < ds.num_nodes;
  report.negatives =
      sampled ? "sampled:" + std::to_string(*model.contrastive.negative_cap) : "exact";

  Rng init_rng = Rng::derive(seed, "init");
  Rng mask_rng = Rng::derive(seed, "masks");
  Rng dropout_rng = Rng::derive(seed, "dropout");
  Rng view_rng = Rng::derive(seed, "views");
  Rng negative_rng = Rng::derive(seed, "negatives");

  ModelParams params = init_params(model, ds.num_features, ds.num_classes, init_rng);
  ad::AdamState adam(config.optimizer, params.values);
  std::vector<ColumnMask> masks = sample_masks(model, mask_rng);

  for (Index epoch = 1; epoch <= config.epochs; ++epoch) {
    if (epoch > 1 && model.effective_resample() == MaskResample::epoch) {
      masks = sample_masks(model, mask_rng);
    }
    EpochRecord record;
    record.epoch = epoch;
    {
      ad::Tape tape;
      const ad::Value x = tape.constant(ds.features);
      std::vector<ad::Value> leaves;
      leaves.reserve(params.size());
      for (const Matrix& m : params.values) leaves.push_back(tape.leaf(m, true));
      const TapeForward forward =
          forward_model(x, data.propagation, model, leaves, masks, true, dropout_rng);
      const LossParts parts =
          total_loss(forward, ds.labels, ds.train_mask, model, view_rng, &negative_rng);
      record.loss = parts.total.item();
      record.classification = parts.classification.item();
      if (parts.contrastive.valid()) record.contrastive = parts.contrastive.item();
      if (!std::isfinite(record.loss)) {
        report.diverged = true;
        report.error = "non-finite loss at epoch " + std::to_string(epoch);
        report.epochs.push_back(record);
        break;
      }
      tape.backward(parts.total);
      std::vector<Matrix> grads;
      grads.reserve(leaves.size());
      for (const ad::Value& leaf : leaves) grads.push_back(leaf.grad());
      try {
        ad::adam_step(params.values, grads, adam);
      } catch (const TrainingError& e) {
        report.diverged = true;
        report.error = "epoch " + std::to_string(epoch) + ": " + e.what();
        report.epochs.push_back(record);
        break;
      }
    }
    if (epoch % config.eval_every == 0 || epoch == config.epochs) {
      const ForwardTrace trace = evaluate_model(ds.features, data.propagation, model, params, masks);
      const double acc = accuracy(trace.logits, ds.labels, ds.test_mask);
      record.test_accuracy = acc;
      report.note_evaluation(epoch, acc);
    }
    report.epochs.push_back(record);
  }

  ForwardTrace trace = evaluate_model(ds.features, data.propagation, model, params, masks);
  report.final_metrics.accuracy = accuracy(trace.logits, ds.labels, ds.test_mask);
  for (const Matrix& h : trace.per_layer) report.final_metrics.mad_per_layer.push_back(mad(h));
  fill_neighbor_metrics(report.final_metrics, data.adjacency, ds.labels, config.metric_orders);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (trained) {
    trained->config = model;
    trained->params = std::move(params);
    trained->masks = std::move(masks);
    trained->trace = std::move(trace);
  }
  return report;
}

RunReport run_single(const RunConfig& config, const PreparedData& data, std::uint64_t seed,
                     const std::filesystem::path& run_dir) {
  TrainedModel trained;
  RunReport report = train_model(config, data, seed, &trained);
  for (Index layer : config.dump_layers) {
    const auto path = run_dir / ("embeddings_layer" + std::to_string(layer) + ".csv");
    dump_embeddings(trained.trace, layer, data.dataset.labels, path);
    report.embedding_files.push_back(path.string());
  }
  write_report(report, run_dir / "report.json");
  return report;
}

RunReport run_single(const RunConfig& config, std::uint64_t seed) {
  const PreparedData data = prepare_data(config);
  return run_single(config, data, seed, config.output_dir);
}

}  // namespace tsc
