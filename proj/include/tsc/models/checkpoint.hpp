#pragma once

#include <filesystem>

#include "tsc/models/models.hpp"

namespace tsc {

/// One line of JSON naming each tensor and its shape, a newline, then every
/// tensor's entries in row-major order as 64-bit little-endian doubles.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);

/// Throws IoError on unreadable, truncated or malformed files.
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace tsc
