#include "netsel/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "netsel/cli/output.hpp"

namespace netsel::cli {

using nlohmann::json;

std::ostream& RunContext::report() const {
  static std::ostream null_stream(nullptr);
  if (quiet) return null_stream;
  return out ? *out : std::cout;
}

std::ostream& RunContext::diagnostics() const { return err ? *err : std::cerr; }

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("NETSEL_OUT_DIR"); env && *env) return env;
  return "netsel-out";
}

namespace {

constexpr const char* kVersion = "netsel 1.0.0";

json network_json(const ResolvedModel& model, const ExperimentConfig& config) {
  const auto& p = model.params;
  json j = {{"capacity", p.capacity()},
            {"arrival", p.arrival()},
            {"delay_weight", p.delay_weight()},
            {"price_primary", p.price_primary()},
            {"price_secondary", p.price_secondary()},
            {"price_gap", model.price_gap}};
  if (model.calibrated) {
    j["price_gap_source"] = "calibrated";
    j["target_share"] = config.network.target_share.value_or(0.68);
    j["price_note"] =
        "operator prices are inputs; the gap is calibrated so the equal-cost share equals "
        "target_share";
  } else {
    j["price_gap_source"] = "explicit";
  }
  return j;
}

json rule_json(const ImitationRuled& rule, const NetworkParamsd& params, long n) {
  json j = {{"description", rule.describe()}, {"noise_free", rule.is_noise_free()}};
  if (const auto* f = std::get_if<Fermi<double>>(&rule.variant())) {
    const double beta0 = beta_reference(params, n);
    j["type"] = "fermi";
    j["beta_absolute"] = f->beta;
    j["beta_reference"] = beta0;
    j["beta_ratio"] = beta0 > 0 ? f->beta * beta0 : 0.0;
  } else if (const auto* pp = std::get_if<PairwiseProportional<double>>(&rule.variant())) {
    j["type"] = "proportional";
    j["scale"] = pp->scale;
  }
  return j;
}

json provenance(const ExperimentConfig& config, const ResolvedModel& model,
                const PopulationConfig& pop, const ImitationRuled& rule,
                const std::string& command) {
  return {{"generator", kVersion},
          {"command", command},
          {"network", network_json(model, config)},
          {"population",
           {{"n", pop.n()},
            {"anchored_primary", pop.anchored_primary()},
            {"anchored_secondary", pop.anchored_secondary()}}},
          {"rule", rule_json(rule, model.params, pop.n())},
          {"config_assignments", config.assigned},
          {"time_convention", "one chain step is one revision event"}};
}

std::string join(const std::vector<long>& values) {
  std::ostringstream s;
  s << "{";
  for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
  s << "}";
  return s.str();
}

std::vector<Row> distribution_rows(const Vector<double>& psi) {
  std::vector<Row> rows;
  for (Eigen::Index k = 0; k < psi.size(); ++k)
    rows.push_back({format_number(long(k)), format_number(psi(k))});
  return rows;
}

std::vector<Row> kernel_rows(const TransitionKerneld& kernel) {
  std::vector<Row> rows;
  for (long k = 0; k <= kernel.n(); ++k)
    rows.push_back({format_number(k), format_number(kernel.up()(k)),
                    format_number(kernel.down()(k)), format_number(kernel.stay()(k))});
  return rows;
}

std::vector<Row> absorption_rows(const AbsorptionProfile<double>& profile) {
  std::vector<Row> rows;
  for (Eigen::Index k = 0; k < profile.prob_at_n.size(); ++k)
    rows.push_back({format_number(long(k)), format_number(profile.prob_at_zero(k)),
                    format_number(profile.prob_at_n(k)),
                    format_number(profile.expected_steps(k))});
  return rows;
}

const Row kAbsorptionHeader = {"k0", "prob_absorb_at_0", "prob_absorb_at_n", "expected_steps"};

// Long-run law of a kernel: the two-point law for noise-free rules, the
// product form for irreducible chains, nothing for absorbing chains.
struct LongRun {
  ChainClass cls;
  std::optional<StationaryDistribution<double>> dist;
};

LongRun long_run(const TransitionKerneld& kernel) {
  LongRun out{classify(kernel), std::nullopt};
  if (kernel.provenance() && kernel.provenance()->rule.is_noise_free()) {
    out.dist = stationary_noise_free(kernel);
  } else if (out.cls.kind == ChainKind::irreducible) {
    out.dist = stationary_product(kernel);
  } else if (out.cls.kind == ChainKind::other) {
    throw analysis_error("no stationary law: chain is neither irreducible nor absorbing (" +
                         out.cls.diagnostics + ")");
  }
  return out;
}

struct PointModel {
  ResolvedModel model;
  PopulationConfig pop;
  ImitationRuled rule;
};

PointModel point_model(const ExperimentConfig& config, std::optional<double> arrival,
                       std::optional<long> n, std::optional<double> beta_ratio) {
  ResolvedModel model = resolve_network(config, arrival);
  PopulationConfig pop = resolve_population(config, n);
  ImitationRuled rule = resolve_rule(config, model.params, pop.n(), beta_ratio);
  return {std::move(model), pop, std::move(rule)};
}

// Returns (metric name, value).
std::pair<std::string, double> sweep_metric(const PointModel& point, SweepMetric metric) {
  const auto& params = point.model.params;
  switch (metric) {
    case SweepMetric::poa_nash:
      return {"poa_nash", poa_at(params, equilibrium(params).share_primary)};
    case SweepMetric::poa_absorbing:
      return {"poa_absorbing", poa_absorbing(params)};
    case SweepMetric::poa_e:
    case SweepMetric::automatic: {
      const auto kernel = build_kernel(params, point.pop, point.rule);
      const LongRun lr = long_run(kernel);
      if (lr.dist) return {"poa_e", expected_poa(params, *lr.dist)};
      if (metric == SweepMetric::poa_e)
        throw analysis_error("poa_e undefined: chain is absorbing");
      return {"poa_absorbing", poa_absorbing(params)};
    }
  }
  throw analysis_error("unknown metric");
}

struct SweepOutcome {
  std::vector<Row> rows;
  json errors = json::array();
  long succeeded = 0;
};

SweepOutcome evaluate_sweep(const ExperimentConfig& config, SweepVariable variable,
                            const std::vector<double>& values, SweepMetric metric) {
  SweepOutcome out;
  for (const double v : values) {
    try {
      std::optional<double> arrival, beta_ratio;
      std::optional<long> n;
      if (variable == SweepVariable::lambda) arrival = v;
      else if (variable == SweepVariable::beta_ratio) {
        if (config.rule.type != RuleType::fermi)
          throw config_error("beta_ratio sweep needs rule.type = fermi");
        beta_ratio = v;
      } else {
        if (v != std::floor(v)) throw config_error("n sweep values must be integers");
        n = static_cast<long>(v);
      }
      const auto point = point_model(config, arrival, n, beta_ratio);
      const auto [name, value] = sweep_metric(point, metric);
      out.rows.push_back({format_number(v), name, format_number(value)});
      ++out.succeeded;
    } catch (const std::exception& e) {
      out.rows.push_back({format_number(v), "error", "nan"});
      out.errors.push_back({{"sweep_value", v}, {"message", e.what()}});
    }
  }
  return out;
}

const Row kSweepHeader = {"sweep_value", "metric", "value"};

}  // namespace

int cmd_equilibrium(const ExperimentConfig& config, const RunContext& ctx) {
  const auto point = point_model(config, std::nullopt, std::nullopt, std::nullopt);
  const auto& params = point.model.params;
  const long n = point.pop.n();
  const auto eq = equilibrium(params);
  const long k_star = ceil_population(eq.share_primary, n);
  const auto opt = social_optimum(params);
  const double s_eq = social_welfare(params, eq.share_primary);

  const std::vector<std::pair<std::string, double>> quantities = {
      {"rate_primary", eq.rate_primary},
      {"share_primary", eq.share_primary},
      {"boundary_flag", eq.boundary_flag ? 1.0 : 0.0},
      {"n", double(n)},
      {"k_star", double(k_star)},
      {"n_times_share", double(n) * eq.share_primary},
      {"social_welfare_at_equilibrium", s_eq},
      {"social_optimum_share", opt.share},
      {"social_optimum", opt.total_delay},
      {"poa_equilibrium", s_eq / opt.total_delay},
      {"poa_absorbing", poa_absorbing(params)},
      {"beta_reference", beta_reference(params, n)},
      {"price_gap", params.price_gap()},
  };
  std::vector<Row> rows;
  auto& report = ctx.report();
  for (const auto& [name, value] : quantities) {
    rows.push_back({name, format_number(value)});
    report << name << " = " << format_number(value) << "\n";
  }
  if (eq.boundary_flag) report << "note: equilibrium is on the boundary\n";
  OutputWriter writer(ctx.out_dir);
  writer.write_csv("equilibrium.csv", {"quantity", "value"}, rows,
                   provenance(config, point.model, point.pop, point.rule, "equilibrium"));
  return kExitOk;
}

int cmd_stationary(const ExperimentConfig& config, const RunContext& ctx) {
  const auto point = point_model(config, std::nullopt, std::nullopt, std::nullopt);
  const auto& params = point.model.params;
  const auto kernel = build_kernel(params, point.pop, point.rule);
  const long n = kernel.n();
  OutputWriter writer(ctx.out_dir);
  json meta = provenance(config, point.model, point.pop, point.rule, "stationary");
  auto& report = ctx.report();

  if (ctx.export_kernel)
    writer.write_csv("kernel.csv", {"k", "up", "down", "stay"}, kernel_rows(kernel), meta);

  const ChainClass cls = classify(kernel);
  meta["chain_class"] = to_string(cls.kind);
  report << "chain: " << to_string(cls.kind) << "\n";

  if (cls.kind == ChainKind::absorbing && !point.rule.is_noise_free()) {
    const auto profile = absorption_profile(kernel);
    meta["notice"] =
        "chain is absorbing: every run ends in k = 0 or k = N; no stationary law on the "
        "interior exists, absorption probabilities are reported instead";
    writer.write_csv("absorption.csv", kAbsorptionHeader, absorption_rows(profile), meta);
    report << "notice: chain is absorbing (states 0 and " << n
           << "); wrote absorption.csv instead of a stationary distribution\n";
    report << "poa_absorbing = " << format_number(poa_absorbing(params)) << "\n";
    return kExitOk;
  }

  const LongRun lr = long_run(kernel);
  const auto& dist = *lr.dist;
  const auto eq = equilibrium(params);
  const long k_star = ceil_population(eq.share_primary, n);
  const auto mode = distribution_mode(dist);
  const double poa_e = expected_poa(params, dist);
  bool mode_near = std::all_of(mode.begin(), mode.end(), [&](long k) {
    return std::abs(double(k) / double(n) - eq.share_primary) <= 1.0 / double(n) + 1e-12;
  });

  json summary = {{"kind", to_string(dist.kind)},
                  {"k_star", k_star},
                  {"n_times_share", double(n) * eq.share_primary},
                  {"mode", mode},
                  {"mode_within_1_over_n_of_equilibrium", mode_near},
                  {"poa_e", poa_e},
                  {"poa_equilibrium", poa_at(params, eq.share_primary)}};
  if (dist.kind == DistributionKind::product_form) {
    const auto check = stationary_eigen(kernel);
    summary["eigen_cross_check_sup_norm"] = (check.psi - dist.psi).cwiseAbs().maxCoeff();
    const auto location = mode_location_check(params, point.pop, dist);
    summary["mode_location_applicable"] = location.applicable;
    if (location.applicable) summary["mode_location_holds"] = location.holds;
    else summary["mode_location_note"] = location.note;
  }
  meta["summary"] = summary;
  writer.write_csv("stationary.csv", {"k", "psi"}, distribution_rows(dist.psi), meta);

  report << "distribution: " << to_string(dist.kind) << "\n"
         << "k_star = " << k_star << "\n"
         << "n_times_share = " << format_number(double(n) * eq.share_primary) << "\n"
         << "mode = " << join(mode) << "\n"
         << "mode_within_1_over_n_of_equilibrium = " << (mode_near ? "true" : "false") << "\n"
         << "poa_e = " << format_number(poa_e) << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, const RunContext& ctx) {
  const auto values = sweep_values(config);
  // validate the base configuration up front so config errors exit with 2
  const auto base = point_model(config, std::nullopt, std::nullopt, std::nullopt);
  const auto outcome = evaluate_sweep(config, config.sweep.variable, values, config.sweep.metric);

  json meta = provenance(config, base.model, base.pop, base.rule, "sweep");
  meta["sweep"] = {{"variable", to_string(config.sweep.variable)},
                   {"metric", to_string(config.sweep.metric)},
                   {"values", values},
                   {"errors", outcome.errors}};
  if (config.sweep.variable == SweepVariable::lambda && base.model.calibrated)
    meta["sweep"]["price_note"] = "price gap recalibrated to target_share at every lambda";
  OutputWriter writer(ctx.out_dir);
  writer.write_csv("sweep.csv", kSweepHeader, outcome.rows, meta);

  auto& report = ctx.report();
  for (const auto& row : outcome.rows) report << row[0] << " " << row[1] << " " << row[2] << "\n";
  for (const auto& e : outcome.errors)
    ctx.diagnostics() << "sweep point " << e["sweep_value"].get<double>()
                      << " failed: " << e["message"].get<std::string>() << "\n";
  return outcome.succeeded > 0 ? kExitOk : kExitAnalysis;
}

int cmd_simulate(const ExperimentConfig& config, const RunContext& ctx) {
  const auto point = point_model(config, std::nullopt, std::nullopt, std::nullopt);
  const auto& params = point.model.params;
  const auto kernel = build_kernel(params, point.pop, point.rule);
  const long n = kernel.n();
  SimulationSpec spec = resolve_simulation(config);
  try {
    spec.validate(n);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  const auto result = run(spec, kernel);

  json meta = provenance(config, point.model, point.pop, point.rule, "simulate");
  meta["simulation"] = {{"seed", spec.seed},
                        {"steps", spec.steps},
                        {"burn_in", spec.burn_in_for(n)},
                        {"replicas", spec.replicas},
                        {"initial_state", config.simulation.initial_state
                                              ? json(*config.simulation.initial_state)
                                              : json("uniform-interior")},
                        {"decimate", spec.decimate},
                        {"random_generator", Xoshiro256pp::name()}};

  const ChainClass cls = classify(kernel);
  std::vector<Row> comparison = {{"chain_class", to_string(cls.kind)}};
  auto& report = ctx.report();
  report << "chain: " << to_string(cls.kind) << "\n";

  const auto empirical = result.histogram.normalised<double>();
  if (cls.kind == ChainKind::irreducible) {
    const auto analytic = stationary_product(kernel);
    const double tv = total_variation(empirical.psi, analytic.psi);
    comparison.push_back({"tv_distance", format_number(tv)});
    comparison.push_back({"poa_e_analytic", format_number(expected_poa(params, analytic))});
    comparison.push_back({"poa_e_empirical", format_number(expected_poa(params, empirical))});
    report << "tv_distance = " << format_number(tv) << "\n";
  } else if (cls.kind == ChainKind::absorbing) {
    long boundary = 0, at_n = 0;
    for (const long k : result.final_states) {
      if (k == 0 || k == n) ++boundary;
      if (k == n) ++at_n;
    }
    const double frac_boundary = double(boundary) / double(result.final_states.size());
    const double frac_n = double(at_n) / double(result.final_states.size());
    comparison.push_back({"fraction_final_in_boundary", format_number(frac_boundary)});
    comparison.push_back({"fraction_final_at_n", format_number(frac_n)});
    report << "fraction_final_in_boundary = " << format_number(frac_boundary) << "\n";
    if (config.simulation.initial_state) {
      const auto analytic = absorption_analysis(kernel, *config.simulation.initial_state);
      comparison.push_back({"prob_absorb_at_n_analytic", format_number(analytic.prob_absorb_at_n)});
      comparison.push_back({"expected_steps_analytic", format_number(analytic.expected_steps)});
    }
  }

  std::vector<Row> traj_rows, hist_rows;
  for (const auto& p : result.trajectory)
    traj_rows.push_back({format_number(p.event), format_number(p.state)});
  for (std::size_t k = 0; k < result.histogram.counts.size(); ++k)
    hist_rows.push_back({format_number(long(k)),
                         std::to_string(result.histogram.counts[k]),
                         format_number(empirical.psi(static_cast<Eigen::Index>(k)))});

  OutputWriter writer(ctx.out_dir);
  writer.write_csv("trajectory.csv", {"event", "k"}, traj_rows, meta);
  writer.write_csv("histogram.csv", {"k", "count", "frequency"}, hist_rows, meta);
  writer.write_csv("comparison.csv", {"quantity", "value"}, comparison, meta);
  return kExitOk;
}

int cmd_replicator(const ExperimentConfig& config, const RunContext& ctx) {
  const auto model = resolve_network(config);
  const auto& params = model.params;
  const auto& rep = config.replicator;
  if (!(rep.x0 > 0 && rep.x0 < 1)) throw config_error("replicator.x0 must be in (0,1)");
  if (!(rep.horizon > 0) || !(rep.rtol > 0) || !(rep.gain > 0))
    throw config_error("replicator horizon, rtol and gain must be positive");
  IntegrateOptions options;
  options.rtol = rep.rtol;
  options.gain = rep.gain;
  const auto result = integrate(params, rep.x0, rep.horizon, options);
  const auto eq = equilibrium(params);

  std::vector<Row> rows;
  for (const auto& s : result.trajectory)
    rows.push_back({format_number(s.time), format_number(s.share_primary)});
  json meta = {{"generator", kVersion},
               {"command", "replicator"},
               {"network", network_json(model, config)},
               {"replicator",
                {{"x0", rep.x0}, {"horizon", rep.horizon}, {"rtol", rep.rtol}, {"gain", rep.gain}}},
               {"converged", result.converged},
               {"fixed_point", result.fixed_point},
               {"equilibrium_share", eq.share_primary},
               {"config_assignments", config.assigned}};
  OutputWriter writer(ctx.out_dir);
  writer.write_csv("replicator.csv", {"time", "x_p"}, rows, meta);

  auto& report = ctx.report();
  report << "fixed_point = " << format_number(result.fixed_point) << "\n"
         << "equilibrium_share = " << format_number(eq.share_primary) << "\n"
         << "converged = " << (result.converged ? "true" : "false") << "\n";
  if (!result.converged) {
    ctx.diagnostics() << "replicator: horizon reached before convergence (final share "
                      << format_number(result.fixed_point) << ")\n";
    return kExitAnalysis;
  }
  return kExitOk;
}

namespace {

ExperimentConfig reference_setup() {
  ExperimentConfig c;
  c.network.capacity = 100;
  c.network.delay_weight = 1;
  c.network.arrival = 30;
  c.network.target_share = 0.68;
  c.population.n = 10;
  return c;
}

std::vector<double> lambda_grid() {
  std::vector<double> grid;
  for (int l = 5; l <= 95; l += 5) grid.push_back(l);
  return grid;
}

json figure_meta(const std::string& figure, const ExperimentConfig& config) {
  const auto model = resolve_network(config);
  return {{"generator", kVersion},
          {"command", "reproduce"},
          {"figure", figure},
          {"network", network_json(model, config)},
          {"population",
           {{"n", config.population.n},
            {"anchored_primary", config.population.anchored_primary},
            {"anchored_secondary", config.population.anchored_secondary}}},
          {"rule",
           {{"type", to_string(config.rule.type)},
            {"beta_ratio", config.rule.beta_ratio ? json(*config.rule.beta_ratio) : json()}}},
          {"monte_carlo", false}};
}

void write_sweep(const OutputWriter& writer, const std::string& name,
                 const ExperimentConfig& config, SweepVariable variable,
                 const std::vector<double>& values, SweepMetric metric, json meta) {
  const auto outcome = evaluate_sweep(config, variable, values, metric);
  meta["sweep"] = {{"variable", to_string(variable)},
                   {"metric", to_string(metric)},
                   {"values", values},
                   {"errors", outcome.errors}};
  if (variable == SweepVariable::lambda)
    meta["sweep"]["price_note"] = "price gap recalibrated to target_share at every lambda";
  writer.write_csv(name, kSweepHeader, outcome.rows, meta);
}

void write_gnuplot(const OutputWriter& writer, const std::string& figure,
                   const std::vector<std::string>& files, const std::string& style) {
  std::ostringstream gp;
  gp << "# " << figure << "\nset datafile separator ','\nset key autotitle columnhead\n"
     << "plot ";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const bool sweep = files[i].find("poa") != std::string::npos;
    gp << (i ? ", \\\n     " : "") << "'" << files[i] << "' using 1:" << (sweep ? 3 : 2)
       << " with " << style << " title '" << files[i] << "'";
  }
  gp << "\n";
  writer.write_text(figure + ".gp", gp.str());
}

StationaryDistribution<double> figure_distribution(const ExperimentConfig& config) {
  const auto point = point_model(config, std::nullopt, std::nullopt, std::nullopt);
  const auto kernel = build_kernel(point.model.params, point.pop, point.rule);
  return *long_run(kernel).dist;
}

void reproduce_fig1a(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::proportional;
  const auto dist = figure_distribution(c);
  const auto params = resolve_network(c).params;
  const auto eq = equilibrium(params);
  json meta = figure_meta("fig1a", c);
  meta["k_star"] = critical_state(params, c.population.n);
  meta["nash_line"] = double(c.population.n) * eq.share_primary;
  meta["support"] = distribution_mode(StationaryDistribution<double>{
      (dist.psi.array() > 0).cast<double>().matrix(), dist.kind});
  w.write_csv("fig1a_stationary.csv", {"k", "psi"}, distribution_rows(dist.psi), meta);
  if (ctx.gnuplot) write_gnuplot(w, "fig1a", {"fig1a_stationary.csv"}, "boxes");
}

void reproduce_fig1b(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::proportional;
  std::vector<std::string> files;
  for (const long n : {10L, 100L}) {
    c.population.n = n;
    const std::string name = "fig1b_poa_e_n" + std::to_string(n) + ".csv";
    write_sweep(w, name, c, SweepVariable::lambda, lambda_grid(), SweepMetric::poa_e,
                figure_meta("fig1b", c));
    files.push_back(name);
  }
  write_sweep(w, "fig1b_poa_nash.csv", c, SweepVariable::lambda, lambda_grid(),
              SweepMetric::poa_nash, figure_meta("fig1b", c));
  files.push_back("fig1b_poa_nash.csv");
  if (ctx.gnuplot) write_gnuplot(w, "fig1b", files, "linespoints");
}

void reproduce_fig2a(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::fermi;
  c.rule.beta_ratio = 1.0;
  const auto point = point_model(c, std::nullopt, std::nullopt, std::nullopt);
  const auto kernel = build_kernel(point.model.params, point.pop, point.rule);
  json meta = figure_meta("fig2a", c);
  meta["note"] = "beta/beta0 = 1 (the noise level behind this figure is not published)";
  w.write_csv("fig2a_absorption.csv", kAbsorptionHeader, absorption_rows(absorption_profile(kernel)),
              meta);
  std::vector<std::string> files = {"fig2a_absorption.csv"};
  if (ctx.with_trajectory) {
    // First replica (in stream order) from k* that is absorbed at all-primary.
    const long n = kernel.n();
    const long start = critical_state(point.model.params, n);
    Xoshiro256pp stream(ctx.seed);
    for (long replica = 0; replica < 10'000; ++replica, stream.jump()) {
      Xoshiro256pp rng = stream;
      std::vector<Row> rows = {{"0", format_number(start)}};
      long k = start;
      long e = 0;
      while (k != 0 && k != n && e < 1'000'000) {
        k = step(k, kernel, rng);
        rows.push_back({format_number(++e), format_number(k)});
      }
      if (k != n) continue;
      json tmeta = meta;
      tmeta["monte_carlo"] = true;
      tmeta["seed"] = ctx.seed;
      tmeta["replica"] = replica;
      tmeta["random_generator"] = Xoshiro256pp::name();
      w.write_csv("fig2a_trajectory.csv", {"event", "k"}, rows, tmeta);
      files.push_back("fig2a_trajectory.csv");
      break;
    }
  }
  if (ctx.gnuplot) write_gnuplot(w, "fig2a", files, "lines");
}

void reproduce_fig2b(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::fermi;
  std::vector<double> grid;
  for (int l = 1; l <= 99; ++l) grid.push_back(l);
  write_sweep(w, "fig2b_poa_absorbing.csv", c, SweepVariable::lambda, grid,
              SweepMetric::poa_absorbing, figure_meta("fig2b", c));
  if (ctx.gnuplot) write_gnuplot(w, "fig2b", {"fig2b_poa_absorbing.csv"}, "lines");
}

void reproduce_fig3a(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::fermi;
  c.population.anchored_primary = 1;
  c.population.anchored_secondary = 1;
  std::vector<std::string> files;
  for (const double ratio : {0.0, 1.0, 10.0}) {
    c.rule.beta_ratio = ratio;
    const auto dist = figure_distribution(c);
    const std::string tag = "beta" + std::to_string(static_cast<int>(ratio));
    json meta = figure_meta("fig3a", c);
    meta["poa_e"] = expected_poa(resolve_network(c).params, dist);
    w.write_csv("fig3a_stationary_" + tag + ".csv", {"k", "psi"}, distribution_rows(dist.psi),
                meta);
    write_sweep(w, "fig3a_poa_e_" + tag + ".csv", c, SweepVariable::lambda, lambda_grid(),
                SweepMetric::poa_e, figure_meta("fig3a", c));
    files.push_back("fig3a_stationary_" + tag + ".csv");
  }
  c.rule.beta_ratio.reset();
  write_sweep(w, "fig3a_poa_e_vs_beta.csv", c, SweepVariable::beta_ratio, {0.0, 1.0, 10.0},
              SweepMetric::poa_e, figure_meta("fig3a", c));
  if (ctx.gnuplot) write_gnuplot(w, "fig3a", files, "linespoints");
}

void reproduce_fig3b(const OutputWriter& w, const RunContext& ctx) {
  ExperimentConfig c = reference_setup();
  c.rule.type = RuleType::fermi;
  c.rule.beta_ratio = 1.0;
  c.population.anchored_primary = 1;
  c.population.anchored_secondary = 1;
  std::vector<std::string> files;
  const auto params = resolve_network(c).params;
  const double share = equilibrium(params).share_primary;
  for (const long n : {10L, 100L, 1000L}) {
    c.population.n = n;
    const auto dist = figure_distribution(c);
    json meta = figure_meta("fig3b", c);
    meta["poa_e"] = expected_poa(params, dist);
    const std::string tag = "n" + std::to_string(n);
    w.write_csv("fig3b_stationary_" + tag + ".csv", {"k", "psi"}, distribution_rows(dist.psi),
                meta);
    // Gaussian centred at the equal-cost point N x*, variance matched to psi
    // about that centre, normalised over 0..N.
    const double centre = double(n) * share;
    double variance = 0;
    for (long k = 0; k <= n; ++k) variance += dist.psi(k) * (k - centre) * (k - centre);
    Vector<double> g(n + 1);
    for (long k = 0; k <= n; ++k) g(k) = std::exp(-(k - centre) * (k - centre) / (2 * variance));
    g /= g.sum();
    std::vector<Row> rows;
    for (long k = 0; k <= n; ++k) rows.push_back({format_number(k), format_number(g(k))});
    json gmeta = meta;
    gmeta["gaussian"] = {{"centre", centre}, {"variance", variance}};
    w.write_csv("fig3b_gaussian_" + tag + ".csv", {"k", "density"}, rows, gmeta);
    write_sweep(w, "fig3b_poa_e_" + tag + ".csv", c, SweepVariable::lambda, lambda_grid(),
                SweepMetric::poa_e, figure_meta("fig3b", c));
    files.push_back("fig3b_stationary_" + tag + ".csv");
    files.push_back("fig3b_gaussian_" + tag + ".csv");
  }
  c.population.n = 10;
  write_sweep(w, "fig3b_poa_e_vs_n.csv", c, SweepVariable::n, {10, 100, 1000}, SweepMetric::poa_e,
              figure_meta("fig3b", c));
  if (ctx.gnuplot) write_gnuplot(w, "fig3b", files, "linespoints");
}

}  // namespace

int cmd_reproduce(const std::string& figure, const RunContext& ctx) {
  const OutputWriter writer(ctx.out_dir);
  const std::vector<std::string> targets =
      figure == "all" ? figure_ids() : std::vector<std::string>{figure};
  for (const auto& id : targets) {
    if (id == "fig1a") reproduce_fig1a(writer, ctx);
    else if (id == "fig1b") reproduce_fig1b(writer, ctx);
    else if (id == "fig2a") reproduce_fig2a(writer, ctx);
    else if (id == "fig2b") reproduce_fig2b(writer, ctx);
    else if (id == "fig3a") reproduce_fig3a(writer, ctx);
    else if (id == "fig3b") reproduce_fig3b(writer, ctx);
    else throw config_error("unknown figure '" + id + "'");
    ctx.report() << "wrote " << id << " data to " << ctx.out_dir.string() << "\n";
  }
  return kExitOk;
}

int run_guarded(const std::function<int()>& command, const RunContext& ctx) {
  try {
    return command();
  } catch (const config_error& e) {
    ctx.diagnostics() << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    ctx.diagnostics() << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const analysis_error& e) {
    ctx.diagnostics() << "analysis error: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const std::domain_error& e) {
    ctx.diagnostics() << "analysis error: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const std::exception& e) {
    ctx.diagnostics() << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace netsel::cli
