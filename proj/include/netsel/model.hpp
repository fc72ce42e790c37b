#pragma once

// Network economics of the primary/secondary selection game: M|M|1 delay
// utilities, the equal-cost traffic split, total delay and the
// price-of-anarchy family of efficiency ratios.
//
// Utilities are signed (utility = -cost) throughout.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "netsel/error.hpp"

namespace netsel {

template <typename Scalar>
class NetworkParams {
 public:
  NetworkParams(Scalar capacity, Scalar arrival, Scalar delay_weight,
                Scalar price_primary, Scalar price_secondary)
      : capacity_(capacity),
        arrival_(arrival),
        delay_weight_(delay_weight),
        price_primary_(price_primary),
        price_secondary_(price_secondary) {
    using std::isfinite;
    if (!(isfinite(capacity) && capacity > 0))
      throw std::invalid_argument("capacity must be finite and positive");
    if (!(isfinite(arrival) && arrival > 0 && arrival < capacity))
      throw std::invalid_argument(
          "arrival must satisfy 0 < arrival < capacity (M|M|1 stability)");
    if (!(isfinite(delay_weight) && delay_weight > 0))
      throw std::invalid_argument("delay_weight must be finite and positive");
    if (!isfinite(price_primary) || !isfinite(price_secondary))
      throw std::invalid_argument("prices must be finite");
  }

  Scalar capacity() const { return capacity_; }
  Scalar arrival() const { return arrival_; }
  Scalar delay_weight() const { return delay_weight_; }
  Scalar price_primary() const { return price_primary_; }
  Scalar price_secondary() const { return price_secondary_; }
  Scalar price_gap() const { return price_primary_ - price_secondary_; }

  NetworkParams with_arrival(Scalar arrival) const {
    return {capacity_, arrival, delay_weight_, price_primary_,
            price_secondary_};
  }
  NetworkParams with_price_gap(Scalar gap) const {
    return {capacity_, arrival_, delay_weight_, price_secondary_ + gap,
            price_secondary_};
  }

 private:
  Scalar capacity_;
  Scalar arrival_;
  Scalar delay_weight_;
  Scalar price_primary_;
  Scalar price_secondary_;
};

using NetworkParamsd = NetworkParams<double>;

template <typename Scalar>
struct EquilibriumInfo {
  Scalar rate_primary;
  Scalar share_primary;
  // True when the equilibrium sits on x = 0 or x = 1, either because the
  // equal-cost formula lands there exactly or because it was clamped.
  bool boundary_flag;
};

// Utility of a primary user when k of n genuine users are primary.
template <typename Scalar>
Scalar utility_primary(const NetworkParams<Scalar>& params, long k, long n) {
  if (n < 1 || k < 0 || k > n)
    throw std::domain_error("utility_primary: k must lie in 0..n");
  const Scalar load = params.arrival() * Scalar(k) / Scalar(n);
  return -(params.delay_weight() / (params.capacity() - load) +
           params.price_primary());
}

// Continuous-share form, used by the mean dynamics.
template <typename Scalar>
Scalar utility_primary_at(const NetworkParams<Scalar>& params, Scalar share) {
  if (!(share >= 0 && share <= 1))
    throw std::domain_error("utility_primary_at: share outside [0,1]");
  return -(params.delay_weight() /
               (params.capacity() - params.arrival() * share) +
           params.price_primary());
}

template <typename Scalar>
Scalar utility_secondary(const NetworkParams<Scalar>& params) {
  return -(params.delay_weight() / (params.capacity() - params.arrival()) +
           params.price_secondary());
}

// Equal-cost split of traffic between the networks. When the two networks
// never cost the same on [0, 1], the equilibrium is the boundary that the
// cheaper network pulls towards.
template <typename Scalar>
EquilibriumInfo<Scalar> equilibrium(const NetworkParams<Scalar>& params) {
  const Scalar c = params.capacity();
  const Scalar lambda = params.arrival();
  const Scalar alpha = params.delay_weight();
  const Scalar gap = params.price_gap();
  const Scalar denom = alpha - (c - lambda) * gap;
  if (denom == 0)
    throw analysis_error(
        "equilibrium: degenerate denominator (delay_weight == (C - lambda) * "
        "price gap)");

  // payoff advantage of primary at x = 1 is -gap; at x = 0 it is
  // alpha/(C-lambda) - alpha/C - gap
  const Scalar adv_full = -gap;
  const Scalar adv_empty = alpha / (c - lambda) - alpha / c - gap;
  if (adv_full >= 0) return {lambda, Scalar(1), true};
  if (adv_empty <= 0) return {Scalar(0), Scalar(0), true};

  Scalar rate = (alpha * lambda - c * (c - lambda) * gap) / denom;
  if (rate < 0) rate = 0;
  if (rate > lambda) rate = lambda;
  const Scalar share = rate / lambda;
  return {rate, share, share == 0 || share == 1};
}

// ceil(n * share) with integers snapped first, so that a share of 0.68 at
// n = 100 gives 68 rather than 69 from the rounding of 100 * 0.68.
template <typename Scalar>
long ceil_population(Scalar share, long n) {
  using std::abs;
  using std::ceil;
  using std::round;
  const Scalar scaled = share * Scalar(n);
  const Scalar nearest = round(scaled);
  const Scalar tol = Scalar(1e-9) * (Scalar(1) > scaled ? Scalar(1) : scaled);
  if (abs(scaled - nearest) <= tol) return static_cast<long>(nearest);
  return static_cast<long>(ceil(scaled));
}

template <typename Scalar>
long critical_state(const NetworkParams<Scalar>& params, long n) {
  if (n < 1) throw std::domain_error("critical_state: n must be >= 1");
  return ceil_population(equilibrium(params).share_primary, n);
}

// Price gap p1 - p2 whose equilibrium share equals target_share.
template <typename Scalar>
Scalar calibrate_price_gap(Scalar capacity, Scalar arrival, Scalar delay_weight,
                           Scalar target_share) {
  if (!(target_share > 0 && target_share <= 1))
    throw std::domain_error("calibrate_price_gap: target share must be in (0,1]");
  if (!(capacity > 0 && arrival > 0 && arrival < capacity && delay_weight > 0))
    throw std::invalid_argument("calibrate_price_gap: invalid network");
  return delay_weight / (capacity - arrival) -
         delay_weight / (capacity - arrival * target_share);
}

// Total delay of all traffic when a fraction `share` uses the primary network.
template <typename Scalar>
Scalar social_welfare(const NetworkParams<Scalar>& params, Scalar share) {
  if (!(share >= 0 && share <= 1))
    throw std::domain_error("social_welfare: share outside [0,1]");
  const Scalar c = params.capacity();
  const Scalar lambda = params.arrival();
  return lambda * (share / (c - lambda * share) + (1 - share) / (c - lambda));
}

template <typename Scalar>
struct SocialOptimum {
  Scalar share;
  Scalar total_delay;
};

template <typename Scalar>
SocialOptimum<Scalar> social_optimum(const NetworkParams<Scalar>& params) {
  using std::sqrt;
  const Scalar c = params.capacity();
  const Scalar lambda = params.arrival();
  const Scalar root_c = sqrt(c);
  const Scalar root_rest = sqrt(c - lambda);
  // dS/dx = 0 gives (C - lambda x)^2 = C (C - lambda); both expressions
  // below are rationalised so they stay accurate as lambda -> 0.
  const Scalar share = root_c / (root_c + root_rest);
  const Scalar s_min = 2 * lambda / (root_rest * (root_c + root_rest));
  return {share, s_min};
}

template <typename Scalar>
Scalar poa_at(const NetworkParams<Scalar>& params, Scalar share) {
  return social_welfare(params, share) / social_optimum(params).total_delay;
}

// PoA when the only stable outcomes are all-secondary and all-primary.
template <typename Scalar>
Scalar poa_absorbing(const NetworkParams<Scalar>& params) {
  using std::sqrt;
  const Scalar root_c = sqrt(params.capacity());
  const Scalar root_rest = sqrt(params.capacity() - params.arrival());
  return (root_c + root_rest) / (2 * root_rest);
}

// Stationary-expected total delay over states k = 0..N (share k/N),
// divided by the social optimum.
template <typename Derived>
typename Derived::Scalar expected_poa(
    const NetworkParams<typename Derived::Scalar>& params,
    const Eigen::MatrixBase<Derived>& psi) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  const Eigen::Index size = psi.size();
  if (size < 2) throw std::domain_error("expected_poa: need at least 2 states");
  if (abs(psi.sum() - Scalar(1)) > Scalar(1e-9))
    throw std::domain_error("expected_poa: distribution does not sum to 1");
  if ((psi.array() < Scalar(0)).any())
    throw std::domain_error("expected_poa: negative probability");
  const long n = static_cast<long>(size - 1);
  Scalar expected = 0;
  for (long k = 0; k <= n; ++k)
    expected += social_welfare(params, Scalar(k) / Scalar(n)) * psi(k);
  return expected / social_optimum(params).total_delay;
}

}  // namespace netsel
