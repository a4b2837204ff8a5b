#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tsc {

/// Seeded random stream. All draws are derived from raw 64-bit engine output
/// so sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for one concern ("init", "masks", "dropout", ...),
  /// derived from a run seed and a fixed label.
  static Rng derive(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tsc
