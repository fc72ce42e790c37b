#pragma once

// Birth-death chain over k, the number of genuine primary users among N.
// One step of the chain is one revision event: a focal user is drawn, meets
// an opponent (genuine or anchored) and imitates with probability q.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "netsel/error.hpp"
#include "netsel/model.hpp"
#include "netsel/protocols.hpp"

namespace netsel {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// N genuine users plus A_P / A_S anchored users that never switch. Anchored
// users are never counted in the state k.
class PopulationConfig {
 public:
  explicit PopulationConfig(long n, long anchored_primary = 0,
                            long anchored_secondary = 0)
      : n_(n), anchored_primary_(anchored_primary),
        anchored_secondary_(anchored_secondary) {
    if (n < 2) throw std::invalid_argument("population needs n >= 2");
    if (anchored_primary < 0 || anchored_secondary < 0)
      throw std::invalid_argument("anchored counts must be >= 0");
  }

  long n() const { return n_; }
  long anchored_primary() const { return anchored_primary_; }
  long anchored_secondary() const { return anchored_secondary_; }

 private:
  long n_;
  long anchored_primary_;
  long anchored_secondary_;
};

template <typename Scalar>
struct KernelProvenance {
  NetworkParams<Scalar> params;
  PopulationConfig population;
  ImitationRule<Scalar> rule;
};

template <typename Scalar>
class TransitionKernel {
 public:
  using VectorType = Vector<Scalar>;

  // Kernel from raw rates; log rates are taken from the values given.
  static TransitionKernel from_rates(VectorType up, VectorType down) {
    VectorType log_up = up.array().log().matrix();
    VectorType log_down = down.array().log().matrix();
    return TransitionKernel(std::move(up), std::move(down), std::move(log_up),
                            std::move(log_down), std::nullopt);
  }

  // Used by build_kernel, which supplies log rates computed without
  // underflow.
  static TransitionKernel from_log_rates(VectorType up, VectorType down,
                                         VectorType log_up, VectorType log_down,
                                         std::optional<KernelProvenance<Scalar>> prov) {
    return TransitionKernel(std::move(up), std::move(down), std::move(log_up),
                            std::move(log_down), std::move(prov));
  }

  long n() const { return static_cast<long>(up_.size()) - 1; }
  const VectorType& up() const { return up_; }
  const VectorType& down() const { return down_; }
  const VectorType& stay() const { return stay_; }
  const VectorType& log_up() const { return log_up_; }
  const VectorType& log_down() const { return log_down_; }
  const std::optional<KernelProvenance<Scalar>>& provenance() const {
    return provenance_;
  }

 private:
  TransitionKernel(VectorType up, VectorType down, VectorType log_up,
                   VectorType log_down, std::optional<KernelProvenance<Scalar>> prov)
      : up_(std::move(up)), down_(std::move(down)), log_up_(std::move(log_up)),
        log_down_(std::move(log_down)), provenance_(std::move(prov)) {
    using std::abs;
    const Eigen::Index size = up_.size();
    if (size < 2 || down_.size() != size || log_up_.size() != size ||
        log_down_.size() != size)
      throw std::invalid_argument("kernel arrays must share a length >= 2");
    for (Eigen::Index k = 0; k < size; ++k) {
      if (!(up_(k) >= 0 && up_(k) <= 1 && down_(k) >= 0 && down_(k) <= 1))
        throw std::invalid_argument("kernel rate outside [0,1] at k = " +
                                    std::to_string(k));
      if (up_(k) + down_(k) > 1 + Scalar(1e-12))
        throw std::invalid_argument("up + down exceeds 1 at k = " +
                                    std::to_string(k));
    }
    if (up_(size - 1) != 0) throw std::invalid_argument("up[N] must be 0");
    if (down_(0) != 0) throw std::invalid_argument("down[0] must be 0");
    stay_ = (VectorType::Ones(size) - up_ - down_).cwiseMax(Scalar(0));
  }

  VectorType up_;
  VectorType down_;
  VectorType stay_;
  VectorType log_up_;
  VectorType log_down_;
  std::optional<KernelProvenance<Scalar>> provenance_;
};

using TransitionKerneld = TransitionKernel<double>;

enum class DistributionKind { two_point_noise_free, product_form, eigenvector, empirical };

inline const char* to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::two_point_noise_free: return "two_point_noise_free";
    case DistributionKind::product_form: return "product_form";
    case DistributionKind::eigenvector: return "eigenvector";
    case DistributionKind::empirical: return "empirical";
  }
  return "unknown";
}

template <typename Scalar>
struct StationaryDistribution {
  Vector<Scalar> psi;
  DistributionKind kind;

  long n() const { return static_cast<long>(psi.size()) - 1; }
};

enum class ChainKind { absorbing, irreducible, other };

inline const char* to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::absorbing: return "absorbing";
    case ChainKind::irreducible: return "irreducible";
    case ChainKind::other: return "other";
  }
  return "unknown";
}

struct ChainClass {
  ChainKind kind;
  std::vector<long> absorbing_states;  // {0, N} when kind == absorbing
  std::string diagnostics;             // describes the zero pattern for `other`
};

namespace detail {

// log of a positive integer product, exact as long as the product fits in
// the 53-bit mantissa. Identical integer products give identical logs,
// which keeps telescoping ratios exact.
template <typename Scalar>
Scalar log_count(long long value) {
  using std::log;
  if (value <= 0) return -std::numeric_limits<Scalar>::infinity();
  return log(Scalar(value));
}

}  // namespace detail

// T_k^+ = (N-k)/N * (k+A_P)/(N-1+A_P+A_S) * q(pi_P^k - pi_S)
// T_k^- = k/N * (N-k+A_S)/(N-1+A_P+A_S) * q(pi_S - pi_P^k)
template <typename Scalar>
TransitionKernel<Scalar> build_kernel(const NetworkParams<Scalar>& params,
                                      const PopulationConfig& pop,
                                      const ImitationRule<Scalar>& rule) {
  const long n = pop.n();
  const long ap = pop.anchored_primary();
  const long as = pop.anchored_secondary();
  const long long denom = static_cast<long long>(n) * (n - 1 + ap + as);
  const Scalar log_denom = detail::log_count<Scalar>(denom);
  const Scalar secondary = utility_secondary(params);

  Vector<Scalar> up(n + 1), down(n + 1), log_up(n + 1), log_down(n + 1);
  for (long k = 0; k <= n; ++k) {
    const Scalar gain = utility_primary(params, k, n) - secondary;
    const long long up_count = static_cast<long long>(n - k) * (k + ap);
    const long long down_count = static_cast<long long>(k) * (n - k + as);
    up(k) = Scalar(up_count) / Scalar(denom) * rule(gain);
    down(k) = Scalar(down_count) / Scalar(denom) * rule(-gain);
    log_up(k) = detail::log_count<Scalar>(up_count) - log_denom +
                rule.log_probability(gain);
    log_down(k) = detail::log_count<Scalar>(down_count) - log_denom +
                  rule.log_probability(-gain);
  }
  return TransitionKernel<Scalar>::from_log_rates(
      std::move(up), std::move(down), std::move(log_up), std::move(log_down),
      KernelProvenance<Scalar>{params, pop, rule});
}

template <typename Scalar>
ChainClass classify(const TransitionKernel<Scalar>& kernel) {
  const long n = kernel.n();
  const auto& up = kernel.up();
  const auto& down = kernel.down();

  bool irreducible = true;
  for (long k = 0; k < n && irreducible; ++k) irreducible = up(k) > 0;
  for (long k = 1; k <= n && irreducible; ++k) irreducible = down(k) > 0;
  if (irreducible) return {ChainKind::irreducible, {}, {}};

  // reaches_low[k]: 0 is reachable from k; reaches_high[k]: N is reachable.
  std::vector<bool> reaches_low(n + 1), reaches_high(n + 1);
  reaches_low[0] = true;
  for (long k = 1; k <= n; ++k) reaches_low[k] = reaches_low[k - 1] && down(k) > 0;
  reaches_high[n] = true;
  for (long k = n - 1; k >= 0; --k) reaches_high[k] = reaches_high[k + 1] && up(k) > 0;

  bool absorbing = up(0) == 0 && down(n) == 0;
  std::vector<long> stuck;
  for (long k = 1; k < n; ++k)
    if (!reaches_low[k] && !reaches_high[k]) stuck.push_back(k);
  absorbing = absorbing && stuck.empty();
  if (absorbing) return {ChainKind::absorbing, {0, n}, {}};

  std::ostringstream diag;
  diag << "zero up-rates at k in {";
  bool first = true;
  for (long k = 0; k < n; ++k)
    if (up(k) == 0) { diag << (first ? "" : ",") << k; first = false; }
  diag << "}; zero down-rates at k in {";
  first = true;
  for (long k = 1; k <= n; ++k)
    if (down(k) == 0) { diag << (first ? "" : ",") << k; first = false; }
  diag << "}";
  if (!stuck.empty()) {
    diag << "; interior states that never reach a boundary: {";
    for (std::size_t i = 0; i < stuck.size(); ++i) diag << (i ? "," : "") << stuck[i];
    diag << "}";
  }
  return {ChainKind::other, {}, diag.str()};
}

// Two-point law on {k*-1, k*} reached by noise-free imitation from an
// interior start.
template <typename Scalar>
StationaryDistribution<Scalar> stationary_noise_free(const TransitionKernel<Scalar>& kernel) {
  if (!kernel.provenance())
    throw analysis_error("stationary_noise_free: kernel has no model provenance");
  const auto& prov = *kernel.provenance();
  if (!prov.rule.is_noise_free())
    throw analysis_error("stationary_noise_free: rule is not noise-free");
  const long n = kernel.n();
  const long k_star = critical_state(prov.params, n);
  if (k_star <= 0 || k_star >= n)
    throw analysis_error("stationary_noise_free: k* = " + std::to_string(k_star) +
                         " is on the boundary; the two-point law needs 1 <= k* <= N-1");
  const Scalar inflow = kernel.up()(k_star - 1);
  const Scalar outflow = kernel.down()(k_star);
  if (inflow + outflow == 0)
    throw analysis_error("stationary_noise_free: no flow between k*-1 and k*");
  Vector<Scalar> psi = Vector<Scalar>::Zero(n + 1);
  psi(k_star - 1) = outflow / (inflow + outflow);
  psi(k_star) = inflow / (inflow + outflow);
  return {std::move(psi), DistributionKind::two_point_noise_free};
}

template <typename Scalar>
StationaryDistribution<Scalar> stationary_noise_free(
    const NetworkParams<Scalar>& params, const PopulationConfig& pop,
    const ImitationRule<Scalar>& rule = ImitationRule<Scalar>::pairwise_proportional()) {
  return stationary_noise_free(build_kernel(params, pop, rule));
}

// psi_k = psi_0 prod_{m=1..k} T^+_{m-1} / T^-_m, accumulated in logs.
template <typename Scalar>
StationaryDistribution<Scalar> stationary_product(const TransitionKernel<Scalar>& kernel) {
  using std::exp;
  const ChainClass cls = classify(kernel);
  if (cls.kind != ChainKind::irreducible)
    throw analysis_error(std::string("stationary_product: chain is ") +
                         to_string(cls.kind) + ", not irreducible");
  const long n = kernel.n();
  Vector<Scalar> log_psi(n + 1);
  log_psi(0) = 0;
  for (long k = 1; k <= n; ++k)
    log_psi(k) = log_psi(k - 1) + kernel.log_up()(k - 1) - kernel.log_down()(k);
  const Scalar peak = log_psi.maxCoeff();
  Vector<Scalar> psi = (log_psi.array() - peak).exp().matrix();
  psi /= psi.sum();
  return {std::move(psi), DistributionKind::product_form};
}

enum class EigenMethod { state_reduction, balance_solve, power_iteration };

struct EigenOptions {
  EigenMethod method = EigenMethod::state_reduction;
  double tolerance = 1e-14;     // power iteration: L1 change per sweep
  long max_iterations = 10'000'000;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> clamp_and_normalise(Vector<Scalar> psi) {
  psi = psi.cwiseMax(Scalar(0));
  const Scalar total = psi.sum();
  if (!(total > 0)) throw analysis_error("stationary_eigen: degenerate solution");
  return psi / total;
}

// Global balance psi (P - I) = 0 with the last equation replaced by
// sum(psi) = 1. Uses the full tridiagonal structure, including T^0.
template <typename Scalar>
Vector<Scalar> balance_solve(const TransitionKernel<Scalar>& kernel) {
  const long n = kernel.n();
  const auto& up = kernel.up();
  const auto& down = kernel.down();
  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(4 * (n + 1)));
  // row j: inflow into j minus outflow from j
  for (long j = 0; j < n; ++j) {
    if (j > 0) entries.emplace_back(j, j - 1, up(j - 1));
    entries.emplace_back(j, j, -(up(j) + down(j)));
    entries.emplace_back(j, j + 1, down(j + 1));
  }
  for (long k = 0; k <= n; ++k) entries.emplace_back(n, k, Scalar(1));
  Eigen::SparseMatrix<Scalar> system(n + 1, n + 1);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
    throw analysis_error("stationary_eigen: balance system is singular");
  Vector<Scalar> rhs = Vector<Scalar>::Zero(n + 1);
  rhs(n) = 1;
  Vector<Scalar> psi = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw analysis_error("stationary_eigen: balance solve failed");
  return clamp_and_normalise<Scalar>(std::move(psi));
}

// Grassmann-Taksar-Heyman state reduction on the off-diagonal part of P.
// States are censored from N down to 1; every update is a sum of products,
// so no cancellation occurs however wide the range of psi.
template <typename Scalar>
Vector<Scalar> state_reduction(const TransitionKernel<Scalar>& kernel) {
  const long n = kernel.n();
  // rows[i] / cols[j]: off-diagonal entries P(i, j) keyed by the other index
  std::vector<std::map<long, Scalar>> rows(n + 1), cols(n + 1);
  auto set = [&](long i, long j, Scalar v) {
    rows[i][j] = v;
    cols[j][i] = v;
  };
  for (long k = 0; k <= n; ++k) {
    if (k < n && kernel.up()(k) > 0) set(k, k + 1, kernel.up()(k));
    if (k > 0 && kernel.down()(k) > 0) set(k, k - 1, kernel.down()(k));
  }
  std::vector<Scalar> exit_rate(n + 1, Scalar(0));
  for (long k = n; k >= 1; --k) {
    Scalar s = 0;
    for (const auto& [j, v] : rows[k])
      if (j < k) s += v;
    if (!(s > 0)) throw analysis_error("stationary_eigen: state reduction hit a zero pivot");
    exit_rate[k] = s;
    for (const auto& [i, pik] : cols[k]) {
      if (i >= k) continue;
      for (const auto& [j, pkj] : rows[k]) {
        if (j >= k || j == i) continue;
        const Scalar v = (rows[i].count(j) ? rows[i][j] : Scalar(0)) + pik * pkj / s;
        set(i, j, v);
      }
    }
  }
  Vector<Scalar> psi = Vector<Scalar>::Zero(n + 1);
  psi(0) = 1;
  for (long k = 1; k <= n; ++k) {
    Scalar inflow = 0;
    for (const auto& [i, v] : cols[k])
      if (i < k) inflow += psi(i) * v;
    psi(k) = inflow / exit_rate[k];
    // rescale to stay within range; only ratios matter
    if (psi(k) > Scalar(1e200)) psi.head(k + 1) /= psi(k);
  }
  return clamp_and_normalise<Scalar>(std::move(psi));
}

// Dense power iteration on the lazy chain (P + I) / 2, which has the same
// fixed vector and is aperiodic.
template <typename Scalar>
Vector<Scalar> power_iteration(const TransitionKernel<Scalar>& kernel,
                               const EigenOptions& options) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const long n = kernel.n();
  Matrix lazy = Matrix::Zero(n + 1, n + 1);
  for (long k = 0; k <= n; ++k) {
    lazy(k, k) = (1 + kernel.stay()(k)) / 2;
    if (k < n) lazy(k, k + 1) = kernel.up()(k) / 2;
    if (k > 0) lazy(k, k - 1) = kernel.down()(k) / 2;
  }
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row =
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Constant(n + 1, Scalar(1) / Scalar(n + 1));
  Scalar change = 0;
  for (long it = 0; it < options.max_iterations; ++it) {
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> next = row * lazy;
    next /= next.sum();
    change = (next - row).cwiseAbs().sum();
    row.swap(next);
    if (change < Scalar(options.tolerance)) return clamp_and_normalise<Scalar>(row.transpose());
  }
  std::ostringstream msg;
  msg << "stationary_eigen: power iteration did not converge after "
      << options.max_iterations << " iterations (last L1 change "
      << static_cast<double>(change) << ", tolerance " << options.tolerance << ")";
  throw analysis_error(msg.str());
}

}  // namespace detail

// Left fixed vector of the transition matrix. State reduction is the
// accurate default; the sparse LU balance solve loses digits on chains with
// several deep wells, and power iteration is slow for such chains.
template <typename Scalar>
StationaryDistribution<Scalar> stationary_eigen(const TransitionKernel<Scalar>& kernel,
                                                const EigenOptions& options = {}) {
  const ChainClass cls = classify(kernel);
  if (cls.kind != ChainKind::irreducible)
    throw analysis_error(std::string("stationary_eigen: chain is ") +
                         to_string(cls.kind) + ", not irreducible");
  Vector<Scalar> psi;
  switch (options.method) {
    case EigenMethod::state_reduction: psi = detail::state_reduction(kernel); break;
    case EigenMethod::balance_solve: psi = detail::balance_solve(kernel); break;
    case EigenMethod::power_iteration: psi = detail::power_iteration(kernel, options); break;
  }
  return {std::move(psi), DistributionKind::eigenvector};
}

template <typename Scalar>
struct AbsorptionProfile {
  Vector<Scalar> prob_at_zero;   // indexed by initial state 0..N
  Vector<Scalar> prob_at_n;
  Vector<Scalar> expected_steps;
};

template <typename Scalar>
struct AbsorptionResult {
  Scalar prob_absorb_at_0;
  Scalar prob_absorb_at_n;
  Scalar expected_steps;
};

// First-step equations (I - Q) h = r over the transient states 1..N-1,
// where Q is the tridiagonal transient block.
template <typename Scalar>
AbsorptionProfile<Scalar> absorption_profile(const TransitionKernel<Scalar>& kernel) {
  const ChainClass cls = classify(kernel);
  if (cls.kind != ChainKind::absorbing)
    throw analysis_error(std::string("absorption_analysis: chain is ") +
                         to_string(cls.kind) + ", not absorbing");
  const long n = kernel.n();
  const auto& up = kernel.up();
  const auto& down = kernel.down();

  AbsorptionProfile<Scalar> out{Vector<Scalar>::Zero(n + 1), Vector<Scalar>::Zero(n + 1),
                                Vector<Scalar>::Zero(n + 1)};
  out.prob_at_zero(0) = 1;
  out.prob_at_n(n) = 1;
  const long m = n - 1;
  if (m == 0) return out;

  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> entries;
  for (long i = 0; i < m; ++i) {
    const long k = i + 1;
    entries.emplace_back(i, i, up(k) + down(k));
    if (i > 0) entries.emplace_back(i, i - 1, -down(k));
    if (i + 1 < m) entries.emplace_back(i, i + 1, -up(k));
  }
  Eigen::SparseMatrix<Scalar> system(m, m);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
    throw analysis_error("absorption_analysis: transient system is singular");

  Vector<Scalar> to_zero = Vector<Scalar>::Zero(m);
  Vector<Scalar> to_n = Vector<Scalar>::Zero(m);
  to_zero(0) = down(1);
  to_n(m - 1) = up(n - 1);
  const Vector<Scalar> ones = Vector<Scalar>::Ones(m);
  // one round of iterative refinement; rates spanning many orders of
  // magnitude otherwise cost a few digits
  auto solve = [&](const Vector<Scalar>& rhs) {
    Vector<Scalar> x = lu.solve(rhs);
    const Vector<Scalar> residual = rhs - system * x;
    x += lu.solve(residual);
    return x;
  };
  out.prob_at_zero.segment(1, m) = solve(to_zero).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  out.prob_at_n.segment(1, m) = solve(to_n).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  out.expected_steps.segment(1, m) = solve(ones);
  return out;
}

template <typename Scalar>
AbsorptionResult<Scalar> absorption_analysis(const TransitionKernel<Scalar>& kernel,
                                             long initial) {
  if (initial < 0 || initial > kernel.n())
    throw std::domain_error("absorption_analysis: initial state outside 0..N");
  const auto profile = absorption_profile(kernel);
  return {profile.prob_at_zero(initial), profile.prob_at_n(initial),
          profile.expected_steps(initial)};
}

// All states whose probability is within relative `rel_tol` of the maximum.
template <typename Scalar>
std::vector<long> distribution_mode(const StationaryDistribution<Scalar>& dist,
                                    double rel_tol = 1e-12) {
  const Scalar peak = dist.psi.maxCoeff();
  std::vector<long> modes;
  for (Eigen::Index k = 0; k < dist.psi.size(); ++k)
    if (dist.psi(k) >= peak * (1 - Scalar(rel_tol))) modes.push_back(static_cast<long>(k));
  return modes;
}

template <typename Scalar>
Scalar expected_poa(const NetworkParams<Scalar>& params,
                    const StationaryDistribution<Scalar>& dist) {
  return expected_poa(params, dist.psi);
}

template <typename Scalar>
Scalar total_variation(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  return (a - b).cwiseAbs().sum() / 2;
}

// Location of the stationary peak against k* for one anchored user per
// network. Not applicable when the equilibrium sits on the boundary.
struct ModeCheck {
  bool applicable;
  long k_star;
  std::vector<long> mode;
  bool holds;  // mode is a subset of {k*-1, k*}
  std::string note;
};

template <typename Scalar>
ModeCheck mode_location_check(const NetworkParams<Scalar>& params,
                             const PopulationConfig& pop,
                             const StationaryDistribution<Scalar>& dist,
                             double rel_tol = 1e-12) {
  ModeCheck out{false, 0, distribution_mode(dist, rel_tol), false, {}};
  const auto eq = equilibrium(params);
  out.k_star = ceil_population(eq.share_primary, pop.n());
  if (eq.boundary_flag) {
    out.note = "equilibrium on the boundary; mode guarantee not applicable";
    return out;
  }
  if (pop.anchored_primary() != 1 || pop.anchored_secondary() != 1) {
    out.note = "mode guarantee only characterised for one anchored user per network";
    return out;
  }
  out.applicable = true;
  out.holds = std::all_of(out.mode.begin(), out.mode.end(), [&](long k) {
    return k == out.k_star - 1 || k == out.k_star;
  });
  return out;
}

// Predicted peak for one anchored user per network: compares the payoff
// gaps on either side of the equal-cost point.
template <typename Scalar>
std::vector<long> predicted_mode(const NetworkParams<Scalar>& params, long n,
                                 double rel_tol = 1e-12) {
  using std::abs;
  const long k_star = critical_state(params, n);
  if (k_star <= 0 || k_star > n)
    throw analysis_error("predicted_mode: k* outside 1..N");
  const Scalar secondary = utility_secondary(params);
  const Scalar below = abs(utility_primary(params, k_star - 1, n) - secondary);
  const Scalar at = abs(utility_primary(params, k_star, n) - secondary);
  const Scalar scale = std::max(below, at);
  if (abs(below - at) <= Scalar(rel_tol) * scale) return {k_star - 1, k_star};
  if (below > at) return {k_star};
  return {k_star - 1};
}

}  // namespace netsel
