#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sgdlab/problems.hpp"
#include "sgdlab/processes.hpp"

namespace sgdlab {

struct ProblemConfig {
  ProblemFamily family = ProblemFamily::quadratic;
  // quadratic payload
  std::vector<Vector> centers;
  std::vector<Matrix> curvatures;  // empty = identity per center
  // logistic payload: either a dataset path or inline rows
  std::string dataset_path;
  std::vector<Vector> features;
  std::vector<double> labels;  // -1/+1
  double ridge = 0.0;
};

struct ProcessConfig {
  ProcessKind stepper = ProcessKind::plain_sgd;
  double eta = 0.1;
  double eta_bar = 0.04;
  Vector x0;  // empty = zeros(d)
  std::int64_t horizon_steps = 100;
  std::int64_t stride = 1;
};

struct SdeConfig {
  double dt = 1e-3;
  double horizon_time = 1.0;
  std::int64_t ensemble_replicates = 0;  // > 0 adds a terminal-point ensemble CSV
};

struct DiagnosticsConfig {
  Vector point;  // empty = zeros(d)
  double delta = 1.0;
  std::int64_t replicates = 10000;
  std::vector<double> eta_grid = {0.2, 0.1, 0.05};
  std::vector<double> eta_bar_grid = {0.1, 0.05, 0.025};
  std::vector<double> moment_eta_grid = {0.04, 0.02, 0.01, 0.005};
  std::string test_function = "identity";
  double time = 1.0;
  double grid_radius = 2.0;
  int grid_points_per_axis = 5;
  double fd_step = 0.0;  // 0 = auto: 1e-3 * (1 + |point|)
  std::string weak_error_method = "hybrid";  // closed_form | hybrid | monte_carlo
  // tolerances (weak slope bounds auto-resolve by method when NaN)
  double weak_slope_min = std::numeric_limits<double>::quiet_NaN();
  double weak_slope_max = std::numeric_limits<double>::quiet_NaN();
  double moment_slope_margin = 0.1;
  double drift_ci_multiple = 4.0;
  double diffusion_se_multiple = 4.0;
  double distribution_floor_multiple = 2.0;
  double curvature_richardson_rel = 0.1;
};

struct ExperimentConfig {
  ProblemConfig problem;
  ProcessConfig process;
  SdeConfig sde;
  DiagnosticsConfig diagnostics;
  std::uint64_t seed = 0;
  std::string output_dir = "sgdlab_out";

  FiniteSumProblem build_problem() const;

  // Canonical effective config (defaults filled), used for hashing and the
  // manifest. Key order is sorted, so the dump is deterministic.
  nlohmann::json to_json() const;
};

// Strict parse: unknown keys are rejected, every constraint is validated at
// parse time, and errors carry the JSON pointer of the offending field
// (ConfigError). Defaults that depend on the problem dimension (x0, point)
// are resolved here.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// FNV-1a over subcommand + canonical config dump; 16 hex digits.
std::string config_hash_hex(const std::string& subcommand, const ExperimentConfig& config);

}  // namespace sgdlab
