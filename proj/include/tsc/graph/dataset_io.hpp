#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsc/graph/dataset.hpp"

namespace tsc {

/// Portable dataset document:
///   { "num_nodes", "num_features", "num_classes",
///     "edges": [[u, v], ...]            (u < v),
///     "features": [[x, ...], ...]       (row-major),
///     "labels": [...], "train_mask": [0/1...], "test_mask": [0/1...] }
///
/// Reversed pairs and repeated pairs are canonicalized and reported through
/// `warnings`; every other violation throws InputError.
GraphDataset parse_dataset(const nlohmann::json& doc,
                           std::vector<std::string>* warnings = nullptr);
GraphDataset load_dataset(const std::filesystem::path& path,
                          std::vector<std::string>* warnings = nullptr);

nlohmann::json dataset_to_json(const GraphDataset& dataset);
/// Writes through a temporary file and renames it into place.
void save_dataset(const GraphDataset& dataset, const std::filesystem::path& path);

/// Writes `text` to `path` atomically (temp file in the same directory, then
/// rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace tsc
