#pragma once

// Experiment orchestration: one family per invocation, flat-file
// outputs, deterministic under fixed (config, seed, version).

#include <string>
#include <vector>

#include "fsl/config.hpp"

namespace fsl {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Families, in CLI order: check, simulate, couple, harnack, fernique,
// contract, concentrate, invariant.
const std::vector<std::string>& experiment_families();

struct RunManifest {
  uint64_t config_hash = 0;
  uint64_t seed = 0;
  std::string version = kArtifactVersion;
  std::string family;
  std::vector<std::string> files;  // relative to the output directory
  // False when an enabled condition check or statistical gate failed;
  // the CLI maps this to exit code 1.
  bool checks_pass = true;
};

RunManifest run_experiment(const ExperimentConfig& cfg,
                           const std::string& family);

}  // namespace fsl
