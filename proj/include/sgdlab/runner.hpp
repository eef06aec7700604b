#pragma once

#include <string>
#include <vector>

#include "sgdlab/config.hpp"

namespace sgdlab {

struct RunResult {
  int exit_code = 0;  // 0 pass, 2 = a diagnostic check failed its tolerance
  std::vector<std::string> artifacts;  // file names inside run_dir
  std::string run_dir;
  std::string stdout_text;  // what the CLI should print
};

// Valid subcommands: simulate, sde, sigma, assumptions, weak-error,
// distribution. Artifacts land in <output_dir>/<config-hash>/ and a
// manifest.json is always written there. Execution errors throw.
RunResult run_subcommand(const std::string& subcommand, const ExperimentConfig& config);

}  // namespace sgdlab
