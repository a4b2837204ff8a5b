#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsc/graph/dataset.hpp"
#include "tsc/graph/sparse_matrix.hpp"
#include "tsc/models/models.hpp"
#include "tsc/runner/report.hpp"
#include "tsc/runner/run_config.hpp"

namespace tsc {

/// Dataset with its adjacency and propagation matrix. Read-only once built,
/// so one instance can serve several worker threads.
struct PreparedData {
  GraphDataset dataset;
  SparseMatrix adjacency;
  SparseMatrix propagation;
  std::vector<std::string> warnings;
  bool row_normalized = false;
  std::string source;
};

PreparedData prepare_data(const RunConfig& config);

/// Trained parameters and the evaluation trace after the last epoch.
struct TrainedModel {
  ModelConfig config;
  ModelParams params;
  std::vector<ColumnMask> masks;
  ForwardTrace trace;
};

/// Trains config.model for config.epochs with Adam, evaluating on the test
/// mask every eval_every epochs and after the last epoch. A non-finite loss
/// or gradient stops training and flags the report as diverged. Nothing is
/// written to disk.
RunReport train_model(const RunConfig& config, const PreparedData& data, std::uint64_t seed,
                      TrainedModel* trained = nullptr);

/// train_model plus persistence: <run_dir>/report.json and any requested
/// embedding dumps.
RunReport run_single(const RunConfig& config, const PreparedData& data, std::uint64_t seed,
                     const std::filesystem::path& run_dir);
RunReport run_single(const RunConfig& config, std::uint64_t seed);

/// Negative sampling resolved for a dataset size: config.model's cap, or the
/// automatic cap above the exact-mode node limit.
ContrastiveConfig resolve_negatives(const RunConfig& config, Index num_nodes);

}  // namespace tsc
