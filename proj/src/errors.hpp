#pragma once

#include <stdexcept>
#include <string>

namespace mpctune {

// Error taxonomy mirrors the CLI exit codes: config/input -> 2, numeric -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query outside the supported region (e.g. interpolation outside the knot hull).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed-loop simulation aborted; carries the hour for diagnostics.
struct SimulationError : NumericalError {
  SimulationError(const std::string& msg, long hour_) : NumericalError(msg), hour(hour_) {}
  long hour = -1;
};

}  // namespace mpctune
