#pragma once

#include <filesystem>
#include <span>

#include "tsc/models/models.hpp"

namespace tsc {

/// CSV with header "label,h0,h1,..." and one row per node; entries printed
/// with 17 significant digits. Throws InputError for layer > L, IoError when
/// the file cannot be written.
void dump_embeddings(const ForwardTrace& trace, Index layer, std::span<const int> labels,
                     const std::filesystem::path& path);

struct LoadedEmbeddings {
  std::vector<int> labels;
  Matrix values;
};

LoadedEmbeddings load_embeddings(const std::filesystem::path& path);

}  // namespace tsc
