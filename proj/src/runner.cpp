#include "sgdlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sgdlab/csv.hpp"
#include "sgdlab/diagnostics.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/montecarlo.hpp"
#include "sgdlab/processes.hpp"
#include "sgdlab/sde.hpp"

namespace sgdlab {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.good()) throw std::runtime_error("write failed for " + path.string());
}

struct Context {
  const ExperimentConfig& cfg;
  FiniteSumProblem problem;
  fs::path run_dir;
  std::vector<std::string> artifacts;

  void emit(const std::string& name, const std::string& text) {
    write_text_file(run_dir / name, text);
    artifacts.push_back(name);
  }
};

double resolved_fd_step(const DiagnosticsConfig& diag) {
  return diag.fd_step > 0.0 ? diag.fd_step : default_curvature_fd_step(diag.point);
}

int run_simulate(Context& ctx) {
  StepperSpec spec{ctx.cfg.process.stepper, ctx.cfg.process.eta, ctx.cfg.process.eta_bar};
  const Trajectory traj =
      simulate(ctx.problem, spec, ctx.cfg.process.x0, ctx.cfg.process.horizon_steps,
               ctx.cfg.process.stride, ctx.cfg.seed);
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  ctx.emit("trajectory.csv", csv.str());
  return 0;
}

int run_sde(Context& ctx) {
  SdeSpec spec{ctx.problem, ctx.cfg.process.eta_bar, ctx.cfg.sde.dt};
  const Trajectory traj = solve_sde(spec, ctx.cfg.process.x0, ctx.cfg.sde.horizon_time,
                                    ctx.cfg.process.stride, ctx.cfg.seed);
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  ctx.emit("sde_trajectory.csv", csv.str());

  if (ctx.cfg.sde.ensemble_replicates > 0) {
    const std::int64_t steps = static_cast<std::int64_t>(
        std::llround(ctx.cfg.sde.horizon_time / ctx.cfg.sde.dt));
    const auto generator = [&](std::uint64_t seed) {
      return solve_sde(spec, ctx.cfg.process.x0, ctx.cfg.sde.horizon_time,
                       std::max<std::int64_t>(steps, 1), seed)
          .states.back()
          .x;
    };
    const std::uint64_t fingerprint =
        std::stoull(config_hash_hex("sde", ctx.cfg), nullptr, 16);
    const Ensemble ens = run_ensemble(generator, ctx.cfg.sde.ensemble_replicates,
                                      SeedSpec{ctx.cfg.seed}, fingerprint);
    std::ostringstream ecsv;
    write_ensemble_csv(ens, ecsv);
    ctx.emit("sde_ensemble.csv", ecsv.str());
  }
  return 0;
}

int run_sigma(Context& ctx, std::string& stdout_text) {
  const Matrix sigma = ctx.problem.noise_covariance(ctx.cfg.diagnostics.point).matrix;
  std::ostringstream csv;
  write_sigma_csv(sigma, csv);
  stdout_text = csv.str();
  ctx.emit("sigma.csv", csv.str());
  return 0;
}

int run_assumptions(Context& ctx) {
  const DiagnosticsConfig& diag = ctx.cfg.diagnostics;
  const CertifyGrids grids = default_certify_grids(
      ctx.problem.dimension(), diag.grid_radius, diag.grid_points_per_axis);

  AssumptionOptions opt;
  opt.eta = ctx.cfg.process.eta;
  opt.eta_bar = ctx.cfg.process.eta_bar;
  opt.delta = diag.delta;
  opt.moment_eta_grid = diag.moment_eta_grid;
  opt.drift_replicates = std::max<std::int64_t>(diag.replicates, 100);
  opt.diffusion_replicates = std::max<std::int64_t>(diag.replicates, 1000);
  opt.drift_ci_multiple = diag.drift_ci_multiple;
  opt.diffusion_se_multiple = diag.diffusion_se_multiple;
  opt.moment_slope_margin = diag.moment_slope_margin;

  const AssumptionReport report =
      assumption_report(ctx.problem, grids.points, diag.point, opt, SeedSpec{ctx.cfg.seed});

  const double h = resolved_fd_step(diag);
  const HypothesisCertificate cert = certify_hypotheses(ctx.problem, grids, h);
  const HypothesisCertificate cert_half = certify_hypotheses(ctx.problem, grids, h / 2.0);

  // Richardson-style stability of the curvature bound under h -> h/2; the
  // near-zero case (constant covariance) passes on the absolute floor.
  const double zero_floor = 1e-8 / (h * h);
  const double larger =
      std::max(cert.curvature.lambda0_estimate, cert_half.curvature.lambda0_estimate);
  const double rel_diff =
      larger > 0.0
          ? std::abs(cert.curvature.lambda0_estimate - cert_half.curvature.lambda0_estimate) /
                larger
          : 0.0;
  const bool curvature_stable =
      larger <= zero_floor || rel_diff <= diag.curvature_richardson_rel;

  bool lipschitz_ok = true;
  double lipschitz_target = std::numeric_limits<double>::quiet_NaN();
  if (ctx.problem.known_gradient_lipschitz().has_value()) {
    lipschitz_target = *ctx.problem.known_gradient_lipschitz();
    lipschitz_ok = cert.lipschitz_estimate <= lipschitz_target * (1.0 + 1e-9) + 1e-12;
  }

  std::ostringstream acsv;
  write_assumptions_csv(report, opt, acsv);
  acsv << "certificate,lipschitz_estimate," << format_double(cert.lipschitz_estimate) << ","
       << format_double(lipschitz_target) << "," << (lipschitz_ok ? 1 : 0) << "\n";
  acsv << "certificate,curvature_richardson," << format_double(rel_diff) << ","
       << format_double(diag.curvature_richardson_rel) << "," << (curvature_stable ? 1 : 0)
       << "\n";
  ctx.emit("assumptions.csv", acsv.str());

  std::ostringstream ccsv;
  write_curvature_csv(cert.curvature, ccsv);
  ctx.emit("curvature.csv", ccsv.str());

  return (report.pass && curvature_stable && lipschitz_ok) ? 0 : 2;
}

int run_weak_error(Context& ctx, std::string& stdout_text) {
  const DiagnosticsConfig& diag = ctx.cfg.diagnostics;
  WeakErrorOptions opt;
  opt.g = test_function_from_name(diag.test_function);
  opt.x0 = ctx.cfg.process.x0;
  opt.horizon_time = diag.time;
  opt.eta_bar_grid = diag.eta_bar_grid;
  opt.sde_dt = ctx.cfg.sde.dt;
  opt.replicates = diag.replicates;
  if (diag.weak_error_method == "closed_form") {
    opt.sgd_closed_form = true;
    opt.sde_closed_form = true;
  } else if (diag.weak_error_method == "monte_carlo") {
    opt.sgd_closed_form = false;
    opt.sde_closed_form = false;
  } else {  // hybrid: substitute the exact SDE value when one exists
    opt.sgd_closed_form = false;
    bool closed_available = false;
    if (ctx.problem.quadratic_spec() != nullptr &&
        ctx.problem.has_identical_quadratic_curvatures()) {
      const Matrix identity =
          Matrix::Identity(ctx.problem.dimension(), ctx.problem.dimension());
      closed_available =
          !(ctx.problem.quadratic_spec()->curvatures.front().array() != identity.array())
               .any();
    }
    opt.sde_closed_form = closed_available;
  }

  const WeakErrorReport report = weak_error_curve(ctx.problem, opt, SeedSpec{ctx.cfg.seed});

  const bool degenerate_zero =
      !report.errors.empty() &&
      *std::max_element(report.errors.begin(), report.errors.end()) < 1e-15;
  const bool slope_ok = degenerate_zero ||
                        (std::isfinite(report.fitted_slope) &&
                         report.fitted_slope >= diag.weak_slope_min &&
                         report.fitted_slope <= diag.weak_slope_max);
  const bool pass = slope_ok && !report.inconclusive;

  std::ostringstream csv;
  write_weak_error_csv(report, csv);
  ctx.emit("weak_error.csv", csv.str());
  std::ostringstream scsv;
  write_weak_error_summary_csv(report, pass, scsv);
  ctx.emit("weak_error_summary.csv", scsv.str());

  stdout_text = "weak-error fitted slope: " + format_double(report.fitted_slope) +
                (report.inconclusive ? " (inconclusive)" : "") + "\n";
  return pass ? 0 : 2;
}

int run_distribution(Context& ctx) {
  const DiagnosticsConfig& diag = ctx.cfg.diagnostics;
  DistributionalOptions opt;
  opt.x0 = ctx.cfg.process.x0;
  opt.time = diag.time;
  opt.eta_grid = diag.eta_grid;
  opt.eta_bar = ctx.cfg.process.eta_bar;
  opt.sde_dt = ctx.cfg.sde.dt;
  opt.replicates = diag.replicates;
  opt.floor_multiple = diag.distribution_floor_multiple;

  const DistributionalReport report =
      distributional_convergence(ctx.problem, opt, SeedSpec{ctx.cfg.seed});

  std::ostringstream csv;
  write_distributional_csv(report, csv);
  ctx.emit("distributional.csv", csv.str());
  std::ostringstream scsv;
  write_distributional_summary_csv(report, scsv);
  ctx.emit("distributional_summary.csv", scsv.str());
  return report.pass ? 0 : 2;
}

}  // namespace

RunResult run_subcommand(const std::string& subcommand, const ExperimentConfig& config) {
  const std::string hash = config_hash_hex(subcommand, config);
  Context ctx{config, config.build_problem(), fs::path(config.output_dir) / hash, {}};
  fs::create_directories(ctx.run_dir);

  RunResult result;
  result.run_dir = ctx.run_dir.string();

  int code = 0;
  if (subcommand == "simulate") {
    code = run_simulate(ctx);
  } else if (subcommand == "sde") {
    code = run_sde(ctx);
  } else if (subcommand == "sigma") {
    code = run_sigma(ctx, result.stdout_text);
  } else if (subcommand == "assumptions") {
    code = run_assumptions(ctx);
  } else if (subcommand == "weak-error") {
    code = run_weak_error(ctx, result.stdout_text);
  } else if (subcommand == "distribution") {
    code = run_distribution(ctx);
  } else {
    throw std::domain_error("unknown subcommand '" + subcommand + "'");
  }

  nlohmann::json manifest;
  manifest["artifacts"] = ctx.artifacts;
  manifest["config_hash"] = hash;
  manifest["exit_code"] = code;
  manifest["seed"] = config.seed;
  manifest["subcommand"] = subcommand;
  write_text_file(ctx.run_dir / "manifest.json", manifest.dump(2) + "\n");

  result.exit_code = code;
  result.artifacts = ctx.artifacts;
  return result;
}

}  // namespace sgdlab
