#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsc/metrics/metrics.hpp"

namespace tsc {

struct EpochRecord {
  Index epoch = 0;
  double loss = 0.0;
  double classification = 0.0;
  /// Unweighted contrastive term; unset when the model has none.
  std::optional<double> contrastive;
  /// Set on evaluation epochs.
  std::optional<double> test_accuracy;
};

struct RunReport {
  nlohmann::json config;  // resolved RunConfig for this run
  std::string model_name;
  std::uint64_t seed = 0;
  Index depth = 0;
  std::vector<EpochRecord> epochs;
  double best_accuracy = 0.0;
  Index best_epoch = 0;
  MetricReport final_metrics;
  /// "exact" or "sampled:<cap>"
  std::string negatives = "exact";
  bool row_normalized = false;
  bool diverged = false;
  std::string error;
  std::vector<std::string> embedding_files;
  double wall_seconds = 0.0;

  /// best_accuracy over the evaluations recorded so far.
  void note_evaluation(Index epoch, double accuracy);
};

nlohmann::json to_json(const RunReport& report, bool include_wall_clock = true);

/// Write-then-rename, so a reader never sees a partial file.
void write_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace tsc
