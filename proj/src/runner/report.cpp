#include "tsc/runner/report.hpp"

#include "tsc/graph/dataset_io.hpp"

namespace tsc {

void RunReport::note_evaluation(Index epoch, double accuracy) {
  if (best_epoch == 0 || accuracy > best_accuracy) {
    best_accuracy = accuracy;
    best_epoch = epoch;
  }
}

nlohmann::json to_json(const RunReport& r, bool include_wall_clock) {
  using nlohmann::json;
  json epochs = json::array();
  for (const EpochRecord& e : r.epochs) {
    json row = {{"epoch", e.epoch}, {"loss", e.loss}, {"classification", e.classification}};
    row["contrastive"] = e.contrastive ? json(*e.contrastive) : json(nullptr);
    row["test_accuracy"] = e.test_accuracy ? json(*e.test_accuracy) : json(nullptr);
    epochs.push_back(std::move(row));
  }
  json doc = {
      {"config", r.config},
      {"model", r.model_name},
      {"seed", r.seed},
      {"depth", r.depth},
      {"epochs", std::move(epochs)},
      {"best_accuracy", r.best_accuracy},
      {"best_epoch", r.best_epoch},
      {"final_metrics", to_json(r.final_metrics)},
      {"negatives", r.negatives},
      {"row_normalized", r.row_normalized},
      {"diverged", r.diverged},
      {"error", r.error},
      {"embedding_files", r.embedding_files},
  };
  if (include_wall_clock) doc["wall_seconds"] = r.wall_seconds;
  return doc;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(report).dump(2) + "\n");
}

}  // namespace tsc
