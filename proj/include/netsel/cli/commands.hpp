#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netsel/cli/config.hpp"

namespace netsel::cli {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitAnalysis = 3,
};

struct RunContext {
  std::filesystem::path out_dir = "netsel-out";
  bool quiet = false;
  std::ostream* out = nullptr;  // report stream; nullptr = std::cout
  std::ostream* err = nullptr;  // diagnostics; nullptr = std::cerr
  bool export_kernel = false;   // stationary: also write kernel.csv
  bool with_trajectory = false; // reproduce fig2a: add a seeded trajectory
  bool gnuplot = false;         // reproduce: add gnuplot script stubs
  std::uint64_t seed = 1;       // reproduce: seed for optional Monte Carlo

  std::ostream& report() const;
  std::ostream& diagnostics() const;
};

int cmd_equilibrium(const ExperimentConfig& config, const RunContext& ctx);
int cmd_stationary(const ExperimentConfig& config, const RunContext& ctx);
int cmd_sweep(const ExperimentConfig& config, const RunContext& ctx);
int cmd_simulate(const ExperimentConfig& config, const RunContext& ctx);
int cmd_replicator(const ExperimentConfig& config, const RunContext& ctx);

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1a", "fig1b", "fig2a",
                                               "fig2b", "fig3a", "fig3b"};
  return ids;
}
// figure is one of figure_ids() or "all".
int cmd_reproduce(const std::string& figure, const RunContext& ctx);

// Runs a command, mapping exceptions to exit codes and printing the message.
int run_guarded(const std::function<int()>& command, const RunContext& ctx);

// Default output directory: $NETSEL_OUT_DIR, else "netsel-out".
std::filesystem::path default_output_dir();

}  // namespace netsel::cli
