#include "tsc/runner/embeddings.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsc/core/errors.hpp"
#include "tsc/graph/dataset_io.hpp"

namespace tsc {

void dump_embeddings(const ForwardTrace& trace, Index layer, std::span<const int> labels,
                     const std::filesystem::path& path) {
  if (layer >= trace.per_layer.size()) {
    throw InputError("dump_embeddings: layer " + std::to_string(layer) + " exceeds depth " +
                     std::to_string(trace.per_layer.size() - 1));
  }
  const Matrix& h = trace.per_layer[layer];
  if (labels.size() != static_cast<std::size_t>(h.rows())) {
    throw InputError("dump_embeddings: one label per row required");
  }
  std::string text = "label";
  for (Eigen::Index j = 0; j < h.cols(); ++j) text += ",h" + std::to_string(j);
  text += '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    text += std::to_string(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", h(i, j));
      text += buf;
    }
    text += '\n';
  }
  write_file_atomic(path, text);
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty embedding file " + path.string());
  std::vector<std::vector<double>> rows;
  LoadedEmbeddings out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    out.labels.push_back(std::stoi(cell));
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("ragged embedding file " + path.string());
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  out.values.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.values(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace tsc
