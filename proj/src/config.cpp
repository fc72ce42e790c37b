#include "netsel/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace netsel::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw config_error("key '" + key + "': expected a number, got '" + raw + "'");
  return value;
}

long parse_long(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  // accept integral values written in scientific notation (steps = 1e7)
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return value;
  const double d = parse_double(key, raw);
  if (d != std::floor(d) || std::abs(d) > 9e15)
    throw config_error("key '" + key + "': expected an integer, got '" + raw + "'");
  return static_cast<long>(d);
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw config_error("key '" + key + "': expected an unsigned 64-bit integer, got '" +
                       raw + "'");
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  if (out.empty()) throw config_error("key '" + key + "': empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"network.capacity",
       [](auto& c, auto& k, auto& v) { c.network.capacity = parse_double(k, v); }},
      {"network.arrival",
       [](auto& c, auto& k, auto& v) { c.network.arrival = parse_double(k, v); }},
      {"network.delay_weight",
       [](auto& c, auto& k, auto& v) { c.network.delay_weight = parse_double(k, v); }},
      {"network.price_primary",
       [](auto& c, auto& k, auto& v) { c.network.price_primary = parse_double(k, v); }},
      {"network.price_secondary",
       [](auto& c, auto& k, auto& v) { c.network.price_secondary = parse_double(k, v); }},
      {"network.target_share",
       [](auto& c, auto& k, auto& v) { c.network.target_share = parse_double(k, v); }},
      {"population.n", [](auto& c, auto& k, auto& v) { c.population.n = parse_long(k, v); }},
      {"population.anchored_primary",
       [](auto& c, auto& k, auto& v) { c.population.anchored_primary = parse_long(k, v); }},
      {"population.anchored_secondary",
       [](auto& c, auto& k, auto& v) { c.population.anchored_secondary = parse_long(k, v); }},
      {"rule.type",
       [](auto& c, auto& k, auto& v) {
         const std::string t = trim(v);
         if (t == "fermi") c.rule.type = RuleType::fermi;
         else if (t == "proportional") c.rule.type = RuleType::proportional;
         else throw config_error("key '" + k + "': expected fermi or proportional, got '" + v + "'");
       }},
      {"rule.beta_ratio",
       [](auto& c, auto& k, auto& v) { c.rule.beta_ratio = parse_double(k, v); }},
      {"rule.beta_absolute",
       [](auto& c, auto& k, auto& v) { c.rule.beta_absolute = parse_double(k, v); }},
      {"rule.scale", [](auto& c, auto& k, auto& v) { c.rule.scale = parse_double(k, v); }},
      {"sweep.variable",
       [](auto& c, auto& k, auto& v) {
         const std::string t = trim(v);
         if (t == "lambda") c.sweep.variable = SweepVariable::lambda;
         else if (t == "beta_ratio") c.sweep.variable = SweepVariable::beta_ratio;
         else if (t == "n") c.sweep.variable = SweepVariable::n;
         else throw config_error("key '" + k + "': expected lambda, beta_ratio or n, got '" + v + "'");
       }},
      {"sweep.values", [](auto& c, auto& k, auto& v) { c.sweep.values = parse_list(k, v); }},
      {"sweep.from", [](auto& c, auto& k, auto& v) { c.sweep.from = parse_double(k, v); }},
      {"sweep.to", [](auto& c, auto& k, auto& v) { c.sweep.to = parse_double(k, v); }},
      {"sweep.step", [](auto& c, auto& k, auto& v) { c.sweep.step = parse_double(k, v); }},
      {"sweep.metric",
       [](auto& c, auto& k, auto& v) {
         const std::string t = trim(v);
         if (t == "auto") c.sweep.metric = SweepMetric::automatic;
         else if (t == "poa_e") c.sweep.metric = SweepMetric::poa_e;
         else if (t == "poa_absorbing") c.sweep.metric = SweepMetric::poa_absorbing;
         else if (t == "poa_nash") c.sweep.metric = SweepMetric::poa_nash;
         else throw config_error("key '" + k + "': expected auto, poa_e, poa_absorbing or poa_nash, got '" + v + "'");
       }},
      {"simulation.seed",
       [](auto& c, auto& k, auto& v) { c.simulation.seed = parse_u64(k, v); }},
      {"simulation.steps",
       [](auto& c, auto& k, auto& v) { c.simulation.steps = parse_long(k, v); }},
      {"simulation.burn_in",
       [](auto& c, auto& k, auto& v) { c.simulation.burn_in = parse_long(k, v); }},
      {"simulation.replicas",
       [](auto& c, auto& k, auto& v) { c.simulation.replicas = parse_long(k, v); }},
      {"simulation.initial_state",
       [](auto& c, auto& k, auto& v) {
         if (trim(v) == "uniform-interior") c.simulation.initial_state.reset();
         else c.simulation.initial_state = parse_long(k, v);
       }},
      {"simulation.decimate",
       [](auto& c, auto& k, auto& v) { c.simulation.decimate = parse_long(k, v); }},
      {"simulation.threads",
       [](auto& c, auto& k, auto& v) {
         const long t = parse_long(k, v);
         if (t < 1) throw config_error("key '" + k + "': threads must be >= 1");
         c.simulation.threads = static_cast<unsigned>(t);
       }},
      {"replicator.x0", [](auto& c, auto& k, auto& v) { c.replicator.x0 = parse_double(k, v); }},
      {"replicator.horizon",
       [](auto& c, auto& k, auto& v) { c.replicator.horizon = parse_double(k, v); }},
      {"replicator.rtol",
       [](auto& c, auto& k, auto& v) { c.replicator.rtol = parse_double(k, v); }},
      {"replicator.gain",
       [](auto& c, auto& k, auto& v) { c.replicator.gain = parse_double(k, v); }},
      {"output.dir", [](auto& c, auto&, auto& v) { c.output_dir = trim(v); }},
  };
  return table;
}

void assign(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw config_error("unknown configuration key '" + key + "'");
  it->second(config, key, value);
  config.assigned[key] = trim(value);
}

bool is_snake_case(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) {
    return std::islower(ch) || std::isdigit(ch) || ch == '_';
  });
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  namespace pt = boost::property_tree;
  // drop trailing `; ...` / `# ...` comments, which the INI reader keeps
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    for (std::size_t i = 1; i < line.size(); ++i)
      if ((line[i] == ';' || line[i] == '#') && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
        line.erase(i);
        break;
      }
    cleaned += line + '\n';
  }
  pt::ptree tree;
  std::istringstream in(cleaned);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty())
      throw config_error("configuration key '" + section +
                         "' must appear inside a [section]");
    if (!is_snake_case(section))
      throw config_error("section name '" + section + "' must be lowercase snake_case");
    for (const auto& [key, node] : body) {
      if (!is_snake_case(key))
        throw config_error("key '" + section + "." + key + "' must be lowercase snake_case");
      assign(base, section + "." + key, node.get_value<std::string>());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open configuration file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), std::move(base));
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw config_error("override '" + assignment + "' must look like section.key=value");
  assign(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ResolvedModel resolve_network(const ExperimentConfig& config, std::optional<double> arrival) {
  const auto& net = config.network;
  const double lambda = arrival.value_or(net.arrival);
  if (net.price_primary && net.target_share)
    throw config_error("set either network.price_primary or network.target_share, not both");
  try {
    if (net.price_primary) {
      NetworkParamsd params(net.capacity, lambda, net.delay_weight, *net.price_primary,
                            net.price_secondary);
      return {params, params.price_gap(), false};
    }
    const double target = net.target_share.value_or(0.68);
    const double gap = calibrate_price_gap(net.capacity, lambda, net.delay_weight, target);
    NetworkParamsd params(net.capacity, lambda, net.delay_weight, net.price_secondary + gap,
                          net.price_secondary);
    return {params, gap, true};
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("network: ") + e.what());
  } catch (const std::domain_error& e) {
    throw config_error(std::string("network: ") + e.what());
  }
}

PopulationConfig resolve_population(const ExperimentConfig& config, std::optional<long> n) {
  try {
    return PopulationConfig(n.value_or(config.population.n), config.population.anchored_primary,
                            config.population.anchored_secondary);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("population: ") + e.what());
  }
}

ImitationRuled resolve_rule(const ExperimentConfig& config, const NetworkParamsd& params,
                            long n, std::optional<double> beta_ratio) {
  const auto& rule = config.rule;
  try {
    if (rule.type == RuleType::proportional) {
      if (rule.beta_ratio || rule.beta_absolute)
        throw config_error("rule: beta keys apply only to type = fermi");
      return ImitationRuled::pairwise_proportional(rule.scale);
    }
    if (rule.beta_ratio && rule.beta_absolute)
      throw config_error("rule: set exactly one of beta_ratio and beta_absolute");
    if (beta_ratio) return fermi_from_ratio(params, n, *beta_ratio);
    if (rule.beta_absolute) return ImitationRuled::fermi(*rule.beta_absolute);
    return fermi_from_ratio(params, n, rule.beta_ratio.value_or(1.0));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("rule: ") + e.what());
  }
}

std::vector<double> sweep_values(const ExperimentConfig& config) {
  const auto& sweep = config.sweep;
  if (!sweep.values.empty()) {
    if (sweep.from || sweep.to || sweep.step)
      throw config_error("sweep: use either values or from/to/step");
    return sweep.values;
  }
  if (!(sweep.from && sweep.to && sweep.step))
    throw config_error("sweep: need values or all of from, to, step");
  if (!(*sweep.step > 0) || *sweep.to < *sweep.from)
    throw config_error("sweep: need step > 0 and to >= from");
  std::vector<double> out;
  const long count = static_cast<long>(std::floor((*sweep.to - *sweep.from) / *sweep.step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(*sweep.from + double(i) * *sweep.step);
  return out;
}

SimulationSpec resolve_simulation(const ExperimentConfig& config) {
  const auto& sim = config.simulation;
  SimulationSpec spec;
  spec.seed = sim.seed;
  spec.steps = sim.steps;
  spec.burn_in = sim.burn_in;
  spec.replicas = sim.replicas;
  if (sim.initial_state) spec.initial_state = *sim.initial_state;
  else spec.initial_state = UniformInterior{};
  spec.decimate = sim.decimate;
  spec.threads = sim.threads;
  return spec;
}

const char* to_string(RuleType type) {
  return type == RuleType::fermi ? "fermi" : "proportional";
}

const char* to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::lambda: return "lambda";
    case SweepVariable::beta_ratio: return "beta_ratio";
    case SweepVariable::n: return "n";
  }
  return "unknown";
}

const char* to_string(SweepMetric metric) {
  switch (metric) {
    case SweepMetric::automatic: return "auto";
    case SweepMetric::poa_e: return "poa_e";
    case SweepMetric::poa_absorbing: return "poa_absorbing";
    case SweepMetric::poa_nash: return "poa_nash";
  }
  return "unknown";
}

}  // namespace netsel::cli
