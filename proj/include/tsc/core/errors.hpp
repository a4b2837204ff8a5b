#pragma once

#include <stdexcept>
#include <string>

namespace tsc {

// Malformed arguments or data handed to an operation.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inconsistent or out-of-range configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure during optimization (non-finite loss or gradient).
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Synthetic data generation could not satisfy its constraints.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tsc
