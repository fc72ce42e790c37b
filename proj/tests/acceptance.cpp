// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "netsel/netsel.hpp"
#include "oracles.hpp"

using namespace netsel;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

NetworkParamsd reference(double arrival = 30) {
  return NetworkParamsd(100, arrival, 1, calibrate_price_gap(100.0, arrival, 1.0, 0.68), 0);
}

NetworkParamsd random_interior(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double c = 10 + 490 * u(rng);
  const double l = c * (0.02 + 0.95 * u(rng));
  const double a = 0.05 + 5 * u(rng);
  return NetworkParamsd(c, l, a, calibrate_price_gap(c, l, a, 0.01 + 0.98 * u(rng)), 0);
}

TransitionKerneld model_kernel(std::mt19937_64& rng, long n) {
  const auto p = random_interior(rng);
  const double ratio = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
  return build_kernel(p, PopulationConfig(n, 1, 1), fermi_from_ratio(p, n, ratio));
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

Outcome criterion1() {
  const auto p = reference();
  const long k_star = critical_state(p, 10);
  const double n_share = 10 * equilibrium(p).share_primary;
  const double gap = p.price_gap();
  const bool pass = k_star == 7 && std::abs(n_share - 6.8) <= 1e-9 &&
                    std::abs(gap - 0.00172290) < 5e-9 &&
                    std::abs(oracle::bisect_equilibrium_share(p) - 0.68) < 1e-12;
  return {pass, fmt("gap = %.10f, k* = %.0f, N x* = %.12f", gap, double(k_star), n_share)};
}

Outcome criterion2() {
  const auto dist = stationary_noise_free(reference(), PopulationConfig(10));
  bool support = true;
  for (long k = 0; k <= 10; ++k) support = support && ((dist.psi(k) > 0) == (k == 6 || k == 7));
  const double total = dist.psi.sum();
  return {support && total == 1.0,
          fmt("psi_6 = %.6f, psi_7 = %.6f, sum - 1 = %.1e", dist.psi(6), dist.psi(7), total - 1)};
}

Outcome criterion3() {
  const double at30 = poa_absorbing(reference(30));
  const double at35 = poa_absorbing(reference(35));
  // the closed form written out directly
  auto literal = [](double c, double l) {
    const double s_abs = l / (c - l);
    const double s_min = 2 * l / (std::sqrt(c - l) * (std::sqrt(c) + std::sqrt(c - l)));
    return s_abs / s_min;
  };
  const bool pass = std::abs(at30 - 1.0976) <= 1e-3 && std::abs(at35 - 1.1202) <= 1e-3 &&
                    std::abs(at30 - literal(100, 30)) < 1e-12 &&
                    std::abs(at35 - literal(100, 35)) < 1e-12 && (at30 - 1.1) * (at35 - 1.1) < 0;
  return {pass, fmt("PoA(30) = %.6f, PoA(35) = %.6f", at30, at35)};
}

Outcome criterion4() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<long> n_dist(4, 200);
  std::uniform_real_distribution<double> log_ratio(std::log(0.1), std::log(50.0));
  long violations = 0, predicted_mismatch = 0, tested = 0;
  while (tested < 500) {
    const auto p = random_interior(rng);
    const auto eq = equilibrium(p);
    if (eq.boundary_flag) continue;
    const long n = n_dist(rng);
    const PopulationConfig pop(n, 1, 1);
    const auto rule = fermi_from_ratio(p, n, std::exp(log_ratio(rng)));
    const auto dist = stationary_product(build_kernel(p, pop, rule));
    const auto check = mode_location_check(p, pop, dist);
    if (!check.applicable || !check.holds) ++violations;
    if (distribution_mode(dist) != predicted_mode(p, n)) ++predicted_mismatch;
    ++tested;
  }

  // constructed instances for each branch of the comparison at k* = 7, N = 10
  const double cost6 = 1.0 / (100 - 30 * 0.6), cost7 = 1.0 / (100 - 30 * 0.7);
  auto with_cost = [](double cost) { return NetworkParamsd(100, 30, 1, 1.0 / 70 - cost, 0); };
  const NetworkParamsd lower = with_cost(0.8 * cost6 + 0.2 * cost7);  // peak at k*-1
  const NetworkParamsd tie = with_cost(0.5 * cost6 + 0.5 * cost7);    // peaks at both
  const NetworkParamsd upper = with_cost(0.2 * cost6 + 0.8 * cost7);  // peak at k*
  bool branches = true;
  for (double ratio : {0.5, 1.0, 5.0}) {
    auto mode_of = [&](const NetworkParamsd& p) {
      return distribution_mode(stationary_product(
          build_kernel(p, PopulationConfig(10, 1, 1), fermi_from_ratio(p, 10, ratio))));
    };
    branches = branches && mode_of(lower) == std::vector<long>{6} &&
               mode_of(tie) == std::vector<long>{6, 7} && mode_of(upper) == std::vector<long>{7};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {violations == 0 && predicted_mismatch == 0 && branches && seconds <= 30,
          fmt("%.0f sets, %.0f violations, %.0f prediction mismatches, %.2f s", double(tested),
              double(violations), double(predicted_mismatch), seconds) +
              (branches ? ", three branches confirmed" : ", branch check FAILED")};
}

Outcome criterion5() {
  const auto p = reference();
  double worst = 0;
  for (long n : {10L, 100L, 1000L}) {
    const auto dist =
        stationary_product(build_kernel(p, PopulationConfig(n, 1, 1), ImitationRuled::fermi(0)));
    for (long k = 0; k <= n; ++k) worst = std::max(worst, std::abs(dist.psi(k) - 1.0 / (n + 1)));
  }
  return {worst <= 1e-12, fmt("max |psi_k - 1/(N+1)| = %.2e", worst)};
}

Outcome criterion6() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long> n_dist(2, 400);
  double worst = 0;
  long largest = 0;
  for (int i = 0; i < 100; ++i) {
    // a third of the kernels come from the model, the rest are arbitrary
    // birth-death chains; two are fixed at N = 1000
    const long n = i < 2 ? 1000 : n_dist(rng);
    largest = std::max(largest, n);
    TransitionKerneld kernel =
        i % 3 == 0 ? model_kernel(rng, n) : oracle::random_irreducible(rng, n);
    const auto product = stationary_product(kernel);
    const auto balance = stationary_eigen(kernel);
    const Eigen::VectorXd detailed = oracle::detailed_balance(kernel);
    worst = std::max({worst, (product.psi - balance.psi).cwiseAbs().maxCoeff(),
                      (product.psi - detailed).cwiseAbs().maxCoeff(),
                      (balance.psi - detailed).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-10 && largest == 1000,
          fmt("100 kernels up to N = %.0f, worst sup-norm gap %.2e", double(largest), worst)};
}

Outcome criterion7() {
  const auto start = std::chrono::steady_clock::now();
  const auto p = reference();
  const auto noisy = fermi_from_ratio(p, 10, 1.0);
  const auto irreducible = build_kernel(p, PopulationConfig(10, 1, 1), noisy);
  SimulationSpec spec;
  spec.seed = 7;
  spec.burn_in = 100000;
  spec.steps = 100000 + 10000000;
  const auto hist = run(spec, irreducible).histogram.normalised();
  const double tv = total_variation(hist.psi, stationary_product(irreducible).psi);

  const auto absorbing = build_kernel(p, PopulationConfig(10), noisy);
  const auto exact = absorption_analysis(absorbing, 5);
  SimulationSpec abs_spec;
  abs_spec.seed = 8;
  abs_spec.steps = 100000000;
  abs_spec.replicas = 10000;
  abs_spec.initial_state = 5L;
  abs_spec.threads = 4;
  const auto freq = absorption_frequency(abs_spec, absorbing);
  const double at_n = freq.fraction_at_n * 10000;
  const bool split = oracle::within_binomial(at_n, 10000, exact.prob_absorb_at_n);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {tv < 0.02 && freq.fraction_unabsorbed == 0 && split && seconds <= 60,
          fmt("TV = %.4f; absorbed %.4f; at N %.4f vs %.4f", tv, 1 - freq.fraction_unabsorbed,
              freq.fraction_at_n, exact.prob_absorb_at_n) +
              fmt("; %.1f s", seconds)};
}

Outcome criterion8() {
  const auto p = reference();
  double worst_fixed = 0;
  bool converged = true;
  for (double x0 : {0.1, 0.5, 0.9}) {
    const auto result = integrate(p, x0, 1e7);
    converged = converged && result.converged;
    worst_fixed = std::max(worst_fixed, std::abs(result.fixed_point - 0.68));
  }
  const auto rule = ImitationRuled::pairwise_proportional();
  double worst_rhs = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    worst_rhs = std::max(worst_rhs, std::abs(mean_dynamics_rhs(rule, p, x) - replicator_rhs(p, x)));
  }
  return {converged && worst_fixed < 1e-6 && worst_rhs <= 1e-12,
          fmt("max |x(T) - x*| = %.2e, max rhs gap = %.2e", worst_fixed, worst_rhs)};
}

Outcome criterion9() {
  const auto p = reference();
  const double share = equilibrium(p).share_primary;
  std::ostringstream detail;
  bool pass = true;
  auto anchored = [&](long n, double ratio) {
    return stationary_product(
        build_kernel(p, PopulationConfig(n, 1, 1), fermi_from_ratio(p, n, ratio)));
  };
  auto mode_close = [&](const StationaryDistribution<double>& dist, long n) {
    const auto mode = distribution_mode(dist);
    return std::all_of(mode.begin(), mode.end(), [&](long k) {
      return std::abs(double(k) / double(n) - share) <= 1.0 / double(n) + 1e-12;
    });
  };
  double previous = std::numeric_limits<double>::infinity();
  detail << "PoA_E over beta/beta0 {0,1,10}:";
  for (double ratio : {0.0, 1.0, 10.0}) {
    const auto dist = anchored(10, ratio);
    const double value = expected_poa(p, dist);
    pass = pass && value <= previous;
    if (ratio > 0) pass = pass && mode_close(dist, 10);
    previous = value;
    detail << fmt(" %.5f", value);
  }
  previous = std::numeric_limits<double>::infinity();
  detail << "; over N {10,100,1000}:";
  for (long n : {10L, 100L, 1000L}) {
    const auto dist = anchored(n, 1.0);
    const double value = expected_poa(p, dist);
    pass = pass && value <= previous && mode_close(dist, n);
    previous = value;
    detail << fmt(" %.5f", value);
  }
  detail << (pass ? "; modes within 1/N of x*" : "");
  return {pass, detail.str()};
}

Outcome criterion10() {
  std::mt19937_64 rng(10);
  double worst_ends = 0, worst_min = 0, least_poa = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const auto p = random_interior(rng);
    const double lc = p.arrival() / (p.capacity() - p.arrival());
    worst_ends = std::max({worst_ends, std::abs(social_welfare(p, 0.0) - lc) / lc,
                           std::abs(social_welfare(p, 1.0) - lc) / lc});
  }
  for (double l : {5.0, 30.0, 35.0, 60.0, 95.0}) {
    const auto p = reference(l);
    const auto grid = oracle::grid_minimum(p, 1e-6);
    worst_min = std::max(worst_min, std::abs(grid.value - social_optimum(p).total_delay));
  }
  // PoA_E over model stationary laws and arbitrary probability vectors
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 300; ++i) {
    const auto p = random_interior(rng);
    const long n = 2 + static_cast<long>(u(rng) * 300);
    Eigen::VectorXd psi;
    if (i % 2 == 0) {
      const double ratio = 50 * u(rng);
      psi = stationary_product(
                build_kernel(p, PopulationConfig(n, 1, 1), fermi_from_ratio(p, n, ratio)))
                .psi;
    } else {
      psi = Eigen::VectorXd::NullaryExpr(n + 1, [&] { return -std::log(1 - u(rng)); });
      psi /= psi.sum();
    }
    least_poa = std::min(least_poa, expected_poa(p, psi));
  }
  const bool pass = worst_ends <= 1e-12 && worst_min <= 1e-6 && least_poa >= 1;
  return {pass, fmt("S(0), S(1) rel gap %.1e; grid vs S_min %.1e; min PoA_E %.6f", worst_ends,
                    worst_min, least_poa)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i]();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %zu: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
