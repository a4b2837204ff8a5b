#include "tsc/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsc/core/errors.hpp"
#include "tsc/graph/dataset_io.hpp"

namespace tsc {
namespace {

constexpr const char* kFormat = "tsc-checkpoint";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  nlohmann::json manifest = {{"format", kFormat}, {"version", 1}, {"tensors", nlohmann::json::array()}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    manifest["tensors"].push_back({{"name", params.names[i]},
                                   {"rows", params.values[i].rows()},
                                   {"cols", params.values[i].cols()}});
  }
  std::string body = manifest.dump() + "\n";
  for (const Matrix& m : params.values) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(m.data()[k]));
      char raw[8];
      std::memcpy(raw, &bits, 8);
      body.append(raw, 8);
    }
  }
  write_file_atomic(path, body);
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw IoError("checkpoint has no manifest: " + path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint manifest is not JSON: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormat || !manifest.contains("tensors")) {
    throw IoError("not a checkpoint file: " + path.string());
  }
  ModelParams params;
  try {
    for (const auto& t : manifest["tensors"]) {
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      if (rows < 0 || cols < 0) throw IoError("checkpoint: negative tensor shape");
      Matrix m(rows, cols);
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        char raw[8];
        if (!in.read(raw, 8)) throw IoError("checkpoint is truncated: " + path.string());
        std::uint64_t bits;
        std::memcpy(&bits, raw, 8);
        m.data()[k] = std::bit_cast<double>(to_little(bits));
      }
      params.names.push_back(t.at("name").get<std::string>());
      params.values.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint manifest is malformed: " + std::string(e.what()));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError("checkpoint has trailing bytes: " + path.string());
  }
  return params;
}

}  // namespace tsc
