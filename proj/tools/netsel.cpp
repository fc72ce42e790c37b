// Command-line front end for the network-selection imitation model.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netsel/cli/commands.hpp"

using namespace netsel::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stochastic imitation dynamics of primary/secondary network selection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "Configuration file (INI sections)");
  app.add_option("--out", out_dir, "Output directory (default: $NETSEL_OUT_DIR or netsel-out)");
  app.add_option("--set", overrides, "Override a configuration value: section.key=value");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (simulate, reproduce)");
  app.add_flag("--quiet", quiet, "Suppress the report on stdout");

  bool export_kernel = false;
  auto* equilibrium = app.add_subcommand("equilibrium", "Equilibrium, k*, welfare and PoA");
  auto* stationary = app.add_subcommand("stationary", "Long-run distribution of the chain");
  stationary->add_flag("--export-kernel", export_kernel, "Also write kernel.csv");
  auto* sweep = app.add_subcommand("sweep", "PoA / expected PoA over a parameter sweep");
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo of the imitation process");
  auto* replicator = app.add_subcommand("replicator", "Integrate the replicator equation");

  std::string figure;
  bool with_trajectory = false, gnuplot = false;
  auto* reproduce = app.add_subcommand("reproduce", "Write the data series behind a figure");
  reproduce->add_option("figure", figure, "fig1a | fig1b | fig2a | fig2b | fig3a | fig3b | all")
      ->required()
      ->check(CLI::IsMember({"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "all"}));
  reproduce->add_flag("--with-trajectory", with_trajectory,
                      "fig2a: add a seeded Monte Carlo trajectory");
  reproduce->add_flag("--gnuplot", gnuplot, "Write gnuplot script stubs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunContext ctx;
  ctx.quiet = quiet;
  ctx.export_kernel = export_kernel;
  ctx.with_trajectory = with_trajectory;
  ctx.gnuplot = gnuplot;
  if (*seed_opt) ctx.seed = seed;

  ExperimentConfig config;
  const int loaded = run_guarded(
      [&] {
        if (!config_path.empty()) config = load_config_file(config_path);
        for (const auto& o : overrides) apply_override(config, o);
        if (*seed_opt) apply_override(config, "simulation.seed=" + std::to_string(seed));
        return kExitOk;
      },
      ctx);
  if (loaded != kExitOk) return loaded;

  if (!out_dir.empty()) ctx.out_dir = out_dir;
  else if (config.output_dir) ctx.out_dir = *config.output_dir;
  else ctx.out_dir = default_output_dir();

  return run_guarded(
      [&] {
        if (*equilibrium) return cmd_equilibrium(config, ctx);
        if (*stationary) return cmd_stationary(config, ctx);
        if (*sweep) return cmd_sweep(config, ctx);
        if (*simulate) return cmd_simulate(config, ctx);
        if (*replicator) return cmd_replicator(config, ctx);
        return cmd_reproduce(figure, ctx);
      },
      ctx);
}
