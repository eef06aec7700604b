#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgdlab/config.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "override the config master seed");
  sub->add_option("--out", args.out_dir, "override the config output directory");
}

int run(const std::string& subcommand, const CommonArgs& args) {
  sgdlab::ExperimentConfig cfg = sgdlab::parse_config(args.config_path);
  if (args.seed.has_value()) cfg.seed = *args.seed;
  if (args.out_dir.has_value()) cfg.output_dir = *args.out_dir;
  const sgdlab::RunResult result = sgdlab::run_subcommand(subcommand, cfg);
  if (!result.stdout_text.empty()) std::cout << result.stdout_text;
  std::cerr << "run dir: " << result.run_dir << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgdlab: SGD diffusion-limit simulation and diagnostics"};
  app.require_subcommand(1);

  const char* subcommands[] = {"simulate", "sde", "sigma", "assumptions", "weak-error",
                               "distribution"};
  const char* descriptions[] = {
      "run one discrete-process trajectory and export it as CSV",
      "integrate the limiting SDE and export trajectory (and optional ensemble) CSVs",
      "print the gradient-noise covariance at a point",
      "estimate drift/diffusion/moment conditions and hypothesis certificates",
      "weak-error curve between SGD and the SDE over an eta_bar grid",
      "distributional distance between embedded SGD and the SDE marginal"};

  CommonArgs args;
  for (std::size_t i = 0; i < 6; ++i)
    add_common(app.add_subcommand(subcommands[i], descriptions[i]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // argument problems are execution errors
  }

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    return run(chosen, args);
  } catch (const sgdlab::ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
