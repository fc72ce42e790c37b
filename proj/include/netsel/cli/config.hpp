#pragma once

// Experiment configuration: an INI-style file of lowercase snake_case keys
// grouped in sections, plus `section.key=value` overrides from the command
// line. Unknown sections or keys are rejected.
//
//   [network]     capacity, arrival, delay_weight, price_primary,
//                 price_secondary, target_share
//   [population]  n, anchored_primary, anchored_secondary
//   [rule]        type (fermi | proportional), beta_ratio, beta_absolute, scale
//   [sweep]       variable (lambda | beta_ratio | n), values, from, to, step,
//                 metric (auto | poa_e | poa_absorbing | poa_nash)
//   [simulation]  seed, steps, burn_in, replicas, initial_state, decimate, threads
//   [replicator]  x0, horizon, rtol, gain
//   [output]      dir

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netsel/netsel.hpp"

namespace netsel::cli {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RuleType { fermi, proportional };
enum class SweepVariable { lambda, beta_ratio, n };
enum class SweepMetric { automatic, poa_e, poa_absorbing, poa_nash };

struct NetworkSection {
  double capacity = 100;
  double arrival = 30;
  double delay_weight = 1;
  std::optional<double> price_primary;
  double price_secondary = 0;
  // When set, price_primary = price_secondary + the gap giving this share.
  // Defaults to 0.68 unless price_primary is given.
  std::optional<double> target_share;
};

struct PopulationSection {
  long n = 10;
  long anchored_primary = 0;
  long anchored_secondary = 0;
};

struct RuleSection {
  RuleType type = RuleType::fermi;
  std::optional<double> beta_ratio;
  std::optional<double> beta_absolute;
  double scale = 1;
};

struct SweepSection {
  SweepVariable variable = SweepVariable::lambda;
  std::vector<double> values;
  std::optional<double> from, to, step;
  SweepMetric metric = SweepMetric::automatic;
};

struct SimulationSection {
  std::uint64_t seed = 1;
  long steps = 1'000'000;
  std::optional<long> burn_in;
  long replicas = 1;
  std::optional<long> initial_state;  // empty = uniform over interior states
  long decimate = 1000;
  unsigned threads = 1;
};

struct ReplicatorSection {
  double x0 = 0.1;
  double horizon = 1e7;
  double rtol = 1e-8;
  double gain = 1;
};

struct ExperimentConfig {
  NetworkSection network;
  PopulationSection population;
  RuleSection rule;
  SweepSection sweep;
  SimulationSection simulation;
  ReplicatorSection replicator;
  std::optional<std::string> output_dir;

  // The raw key/value pairs that were set, for provenance.
  std::map<std::string, std::string> assigned;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path,
                                  ExperimentConfig base = {});
// `assignment` is `section.key=value`.
void apply_override(ExperimentConfig& config, const std::string& assignment);

struct ResolvedModel {
  NetworkParamsd params;
  double price_gap;
  bool calibrated;  // gap came from target_share
};

// Builds the network parameters, optionally at a different arrival rate
// (sweeps). Throws config_error on invalid values.
ResolvedModel resolve_network(const ExperimentConfig& config,
                              std::optional<double> arrival = std::nullopt);
PopulationConfig resolve_population(const ExperimentConfig& config,
                                    std::optional<long> n = std::nullopt);
ImitationRuled resolve_rule(const ExperimentConfig& config, const NetworkParamsd& params,
                            long n, std::optional<double> beta_ratio = std::nullopt);
std::vector<double> sweep_values(const ExperimentConfig& config);
SimulationSpec resolve_simulation(const ExperimentConfig& config);

const char* to_string(RuleType type);
const char* to_string(SweepVariable variable);
const char* to_string(SweepMetric metric);

}  // namespace netsel::cli
