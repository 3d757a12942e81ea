#pragma once

#include <string>

#include "bo.hpp"
#include "plant.hpp"

namespace mpctune {

// Settings for a tuning run; the kernel hyperparameters ride along in the
// same config file as the plant (keys prefixed "bo.").
struct BoSettings {
  double kappa = 2.6;
  int n_init = 3;
  int max_iter = 10;
  int restarts = 16;
  uint64_t seed = 0;
  double lengthscale = 1.0;
  double nu = 2.5;
  double noise = 1e-6;

  BoConfig to_bo_config() const;
};

struct AppConfig {
  PlantConfig plant;
  BoSettings bo;
};

// Flat "key = value" file, '#' comments. Unknown keys, duplicates, malformed
// numbers and missing required plant keys are reported with line numbers.
AppConfig load_config(const std::string& path);

// Round-trippable writer; every key is emitted with its unit in a comment.
void write_config(const AppConfig& config, const std::string& path);
std::string config_to_string(const AppConfig& config);

// FNV-1a hash of the canonical serialized form.
uint64_t config_hash(const AppConfig& config);

}  // namespace mpctune
