#include "tsc/graph/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tsc/core/errors.hpp"

namespace tsc {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw InputError(std::string("dataset: missing field '") + key + "'");
  return *it;
}

Index read_count(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string("dataset: '") + key + "' must be a non-negative integer");
  }
  return v.get<Index>();
}

std::vector<bool> read_mask(const json& doc, const char* key, Index n) {
  const json& arr = require(doc, key);
  if (!arr.is_array() || arr.size() != n) {
    throw InputError(std::string("dataset: '") + key + "' must have num_nodes entries");
  }
  std::vector<bool> mask(n);
  for (Index i = 0; i < n; ++i) {
    const json& v = arr[i];
    if (v.is_boolean()) {
      mask[i] = v.get<bool>();
    } else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) {
      mask[i] = v.get<int>() == 1;
    } else {
      throw InputError(std::string("dataset: '") + key + "' entries must be 0 or 1");
    }
  }
  return mask;
}

}  // namespace

GraphDataset parse_dataset(const json& doc, std::vector<std::string>* warnings) {
  if (!doc.is_object()) throw InputError("dataset: document must be a JSON object");
  GraphDataset ds;
  ds.num_nodes = read_count(doc, "num_nodes");
  ds.num_features = read_count(doc, "num_features");
  ds.num_classes = read_count(doc, "num_classes");
  const Index n = ds.num_nodes;

  const json& edges = require(doc, "edges");
  if (!edges.is_array()) throw InputError("dataset: 'edges' must be an array");
  std::set<Edge> seen;
  Index reversed = 0, repeated = 0;
  ds.edges.reserve(edges.size());
  for (const json& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || e[0].get<long long>() < 0 ||
        e[1].get<long long>() < 0) {
      throw InputError("dataset: each edge must be a pair of non-negative integers");
    }
    Index u = e[0].get<Index>(), v = e[1].get<Index>();
    if (u > v) {
      std::swap(u, v);
      ++reversed;
    }
    if (!seen.insert({u, v}).second) {
      ++repeated;
      continue;
    }
    ds.edges.emplace_back(u, v);
  }
  if (warnings && reversed > 0) {
    warnings->push_back(std::to_string(reversed) + " edges had u > v and were reordered");
  }
  if (warnings && repeated > 0) {
    warnings->push_back(std::to_string(repeated) + " repeated edges were dropped");
  }

  const json& feats = require(doc, "features");
  if (!feats.is_array() || feats.size() != n) {
    throw InputError("dataset: 'features' must have num_nodes rows");
  }
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ds.num_features));
  for (Index i = 0; i < n; ++i) {
    const json& row = feats[i];
    if (!row.is_array() || row.size() != ds.num_features) {
      throw InputError("dataset: feature row " + std::to_string(i) +
                       " must have num_features entries");
    }
    for (Index j = 0; j < ds.num_features; ++j) {
      if (!row[j].is_number()) throw InputError("dataset: features must be numbers");
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j].get<double>();
    }
  }

  const json& labels = require(doc, "labels");
  if (!labels.is_array() || labels.size() != n) {
    throw InputError("dataset: 'labels' must have num_nodes entries");
  }
  ds.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (!labels[i].is_number_integer()) throw InputError("dataset: labels must be integers");
    ds.labels[i] = labels[i].get<int>();
  }
  ds.train_mask = read_mask(doc, "train_mask", n);
  ds.test_mask = read_mask(doc, "test_mask", n);

  std::sort(ds.edges.begin(), ds.edges.end());
  ds.validate();
  return ds;
}

GraphDataset load_dataset(const std::filesystem::path& path,
                          std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("dataset " + path.string() + ": " + e.what());
  }
  return parse_dataset(doc, warnings);
}

json dataset_to_json(const GraphDataset& ds) {
  json doc;
  doc["num_nodes"] = ds.num_nodes;
  doc["num_features"] = ds.num_features;
  doc["num_classes"] = ds.num_classes;
  json edges = json::array();
  for (const auto& [u, v] : ds.edges) edges.push_back({std::min(u, v), std::max(u, v)});
  doc["edges"] = std::move(edges);
  json feats = json::array();
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) row.push_back(ds.features(i, j));
    feats.push_back(std::move(row));
  }
  doc["features"] = std::move(feats);
  doc["labels"] = ds.labels;
  json train = json::array(), test = json::array();
  for (Index i = 0; i < ds.num_nodes; ++i) {
    train.push_back(ds.train_mask[i] ? 1 : 0);
    test.push_back(ds.test_mask[i] ? 1 : 0);
  }
  doc["train_mask"] = std::move(train);
  doc["test_mask"] = std::move(test);
  return doc;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void save_dataset(const GraphDataset& dataset, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_json(dataset).dump() + "\n");
}

}  // namespace tsc
