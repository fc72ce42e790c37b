#pragma once

// Two-strategy mean dynamics. The state is the primary share x_P; the
// secondary share is 1 - x_P.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "netsel/model.hpp"
#include "netsel/protocols.hpp"

namespace netsel {

template <typename Scalar>
struct ReplicatorState {
  Scalar share_primary;
  Scalar time;
  Scalar gain = 1;
};

// dx/dt = K x (1 - x) (pi_P(x) - pi_S)
template <typename Scalar>
Scalar replicator_rhs(const NetworkParams<Scalar>& params, Scalar share,
                      Scalar gain = 1) {
  if (!(share >= 0 && share <= 1))
    throw std::domain_error("replicator_rhs: share outside [0,1]");
  const Scalar advantage = utility_primary_at(params, share) - utility_secondary(params);
  return gain * share * (1 - share) * advantage;
}

// dx_P/dt = x_S rho_SP - x_P rho_PS with rho_ij = x_j q(pi_j - pi_i): an
// i-strategist meets a j-strategist with probability x_j and copies with
// probability q.
template <typename Scalar>
Scalar mean_dynamics_rhs(const ImitationRule<Scalar>& rule,
                         const NetworkParams<Scalar>& params, Scalar share) {
  if (!(share >= 0 && share <= 1))
    throw std::domain_error("mean_dynamics_rhs: share outside [0,1]");
  const Scalar x_p = share;
  const Scalar x_s = 1 - share;
  const Scalar primary = utility_primary_at(params, share);
  const Scalar secondary = utility_secondary(params);
  const Scalar rho_sp = x_p * rule(primary - secondary);
  const Scalar rho_ps = x_s * rule(secondary - primary);
  return x_s * rho_sp - x_p * rho_ps;
}

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-14;
  double gain = 1;
  double initial_step = 1;
  long max_steps = 1'000'000;
};

template <typename Scalar>
struct IntegrationResult {
  std::vector<ReplicatorState<Scalar>> trajectory;  // every accepted step
  Scalar fixed_point;
  bool converged;
  long rejected_steps;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr std::array<double, 7> kDpC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr std::array<double, 7> kDpB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                             -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr std::array<double, 7> kDpB4{5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace detail

// Adaptive explicit integration of the replicator equation from an interior
// share. Converged once the drift is negligible relative to its natural
// scale K x (1 - x) max(|pi_P(0) - pi_S|, |pi_P(1) - pi_S|), which puts the
// state within about rtol of an interior rest point; or once the state is
// within rtol of a boundary it is being driven to.
template <typename Scalar>
IntegrationResult<Scalar> integrate(const NetworkParams<Scalar>& params, Scalar x0,
                                    Scalar horizon, const IntegrateOptions& options = {}) {
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  if (!(x0 > 0 && x0 < 1))
    throw std::domain_error("integrate: start must be interior (0 < x0 < 1)");
  if (!(horizon > 0)) throw std::domain_error("integrate: horizon must be positive");
  const Scalar gain = Scalar(options.gain);
  const Scalar rtol = Scalar(options.rtol);
  const Scalar atol = Scalar(options.atol);
  auto rhs = [&](Scalar x) { return replicator_rhs(params, x, gain); };

  const Scalar secondary = utility_secondary(params);
  const Scalar drift_scale =
      max(abs(utility_primary_at(params, Scalar(0)) - secondary),
          abs(utility_primary_at(params, Scalar(1)) - secondary));
  auto converged_at = [&](Scalar x) {
    const Scalar f = rhs(x);
    if (abs(f) <= rtol * gain * x * (1 - x) * drift_scale) return true;
    return (x <= rtol && f <= 0) || (1 - x <= rtol && f >= 0);
  };

  IntegrationResult<Scalar> out{{}, x0, false, 0};
  Scalar x = x0;
  Scalar t = 0;
  Scalar h = Scalar(options.initial_step);
  out.trajectory.push_back({x, t, gain});
  if (converged_at(x)) {
    out.converged = true;
    return out;
  }

  std::array<Scalar, 7> k{};
  for (long step = 0; step < options.max_steps && t < horizon; ++step) {
    h = min(h, horizon - t);
    k[0] = rhs(x);
    bool left_interval = false;
    for (int s = 1; s < 7 && !left_interval; ++s) {
      Scalar xs = x;
      for (int j = 0; j < s; ++j) xs += h * Scalar(detail::kDpA[s][j]) * k[j];
      if (!(xs >= 0 && xs <= 1)) left_interval = true;
      else k[s] = rhs(xs);
    }
    if (left_interval) {
      h /= 4;
      ++out.rejected_steps;
      continue;
    }
    Scalar x5 = x, x4 = x;
    for (int s = 0; s < 7; ++s) {
      x5 += h * Scalar(detail::kDpB5[s]) * k[s];
      x4 += h * Scalar(detail::kDpB4[s]) * k[s];
    }
    const Scalar err = abs(x5 - x4);
    const Scalar tol = atol + rtol * max(abs(x), abs(x5));
    const Scalar ratio = err / tol;
    if (ratio <= 1 && x5 >= 0 && x5 <= 1) {
      t += h;
      x = x5;
      out.trajectory.push_back({x, t, gain});
      if (converged_at(x)) {
        out.converged = true;
        break;
      }
    } else {
      ++out.rejected_steps;
    }
    const Scalar factor =
        ratio == 0 ? Scalar(5) : min(Scalar(5), max(Scalar(0.2), Scalar(0.9) * pow(ratio, Scalar(-0.2))));
    h *= factor;
  }
  out.fixed_point = x;
  return out;
}

}  // namespace netsel
