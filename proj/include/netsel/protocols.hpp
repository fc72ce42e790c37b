#pragma once

// Imitation rules: nondecreasing maps q(z) from the payoff gain z of
// switching to a switch probability in [0, 1].

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "netsel/model.hpp"

namespace netsel {

// q(z) = min(1, scale * max(0, z)). Never imitates a worse-off opponent.
// Payoff gaps in realistic parameter regimes are far below 1/scale, so the
// clamp at 1 is normally inactive.
template <typename Scalar>
struct PairwiseProportional {
  Scalar scale = 1;
};

// Logistic rule q(z) = 1 / (1 + exp(-beta z)); beta is the inverse noise.
template <typename Scalar>
struct Fermi {
  Scalar beta = 1;
};

// User-supplied nondecreasing map; noise-freeness is detected by probing
// q at nonpositive gains.
template <typename Scalar>
struct CustomRule {
  std::function<Scalar(Scalar)> q;
  std::string name = "custom";
};

template <typename Scalar>
class ImitationRule {
 public:
  using Variant = std::variant<PairwiseProportional<Scalar>, Fermi<Scalar>,
                               CustomRule<Scalar>>;

  static ImitationRule pairwise_proportional(Scalar scale = 1) {
    if (!(std::isfinite(static_cast<double>(scale)) && scale > 0))
      throw std::invalid_argument("pairwise proportional scale must be > 0");
    return ImitationRule(PairwiseProportional<Scalar>{scale});
  }

  static ImitationRule fermi(Scalar beta) {
    if (!(std::isfinite(static_cast<double>(beta)) && beta >= 0))
      throw std::invalid_argument("fermi beta must be finite and >= 0");
    return ImitationRule(Fermi<Scalar>{beta});
  }

  // `probe_range` bounds the payoff gaps the rule will be evaluated on;
  // monotonicity and [0,1] bounds are spot-checked over it.
  static ImitationRule custom(std::function<Scalar(Scalar)> q,
                              Scalar probe_range, std::string name = "custom") {
    if (!q) throw std::invalid_argument("custom rule needs a callable");
    constexpr int kProbes = 2001;
    Scalar prev = -std::numeric_limits<Scalar>::infinity();
    for (int i = 0; i < kProbes; ++i) {
      const Scalar z = -probe_range + 2 * probe_range * Scalar(i) / (kProbes - 1);
      const Scalar v = q(z);
      if (!(v >= 0 && v <= 1))
        throw std::invalid_argument("custom rule leaves [0,1] at z = " +
                                    std::to_string(static_cast<double>(z)));
      if (v < prev)
        throw std::invalid_argument("custom rule decreases at z = " +
                                    std::to_string(static_cast<double>(z)));
      prev = v;
    }
    return ImitationRule(CustomRule<Scalar>{std::move(q), std::move(name)});
  }

  const Variant& variant() const { return rule_; }

  Scalar operator()(Scalar z) const {
    return std::visit([z](const auto& r) { return evaluate(r, z); }, rule_);
  }

  // log q(z); -inf where q vanishes. Accurate in the tails of the Fermi rule
  // where q itself underflows.
  Scalar log_probability(Scalar z) const {
    using std::exp;
    using std::log;
    using std::log1p;
    if (const auto* f = std::get_if<Fermi<Scalar>>(&rule_)) {
      const Scalar t = f->beta * z;
      return t >= 0 ? -log1p(exp(-t)) : t - log1p(exp(t));
    }
    const Scalar v = (*this)(z);
    return v > 0 ? log(v) : -std::numeric_limits<Scalar>::infinity();
  }

  // q(z) = 0 for all z <= 0.
  bool is_noise_free() const {
    if (std::holds_alternative<PairwiseProportional<Scalar>>(rule_)) return true;
    if (std::holds_alternative<Fermi<Scalar>>(rule_)) return false;
    const auto& c = std::get<CustomRule<Scalar>>(rule_);
    return c.q(Scalar(0)) == 0 && c.q(-Scalar(1e-12)) == 0 &&
           c.q(-Scalar(1)) == 0;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& r) -> std::string {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, PairwiseProportional<Scalar>>)
            return "proportional(scale=" +
                   std::to_string(static_cast<double>(r.scale)) + ")";
          else if constexpr (std::is_same_v<T, Fermi<Scalar>>)
            return "fermi(beta=" + std::to_string(static_cast<double>(r.beta)) +
                   ")";
          else
            return r.name;
        },
        rule_);
  }

 private:
  explicit ImitationRule(Variant rule) : rule_(std::move(rule)) {}

  static Scalar evaluate(const PairwiseProportional<Scalar>& r, Scalar z) {
    if (!(z > 0)) return Scalar(0);
    return std::min(Scalar(1), r.scale * z);
  }
  static Scalar evaluate(const Fermi<Scalar>& r, Scalar z) {
    using std::exp;
    const Scalar t = r.beta * z;
    if (t >= 0) return Scalar(1) / (Scalar(1) + exp(-t));
    const Scalar e = exp(t);
    return e / (Scalar(1) + e);
  }
  static Scalar evaluate(const CustomRule<Scalar>& r, Scalar z) { return r.q(z); }

  Variant rule_;
};

using ImitationRuled = ImitationRule<double>;

template <typename Scalar>
Scalar imitation_probability(const ImitationRule<Scalar>& rule, Scalar payoff_diff) {
  return rule(payoff_diff);
}

// Noise normalisation beta_0 = max_k |pi_P^k - pi_S| over k = 0..n.
template <typename Scalar>
Scalar beta_reference(const NetworkParams<Scalar>& params, long n) {
  using std::abs;
  if (n < 1) throw std::domain_error("beta_reference: n must be >= 1");
  const Scalar secondary = utility_secondary(params);
  Scalar best = 0;
  for (long k = 0; k <= n; ++k)
    best = std::max(best, abs(utility_primary(params, k, n) - secondary));
  return best;
}

// Fermi rule from the dimensionless ratio beta / beta_0.
template <typename Scalar>
ImitationRule<Scalar> fermi_from_ratio(const NetworkParams<Scalar>& params,
                                       long n, Scalar beta_ratio) {
  if (!(beta_ratio >= 0)) throw std::invalid_argument("beta_ratio must be >= 0");
  const Scalar beta0 = beta_reference(params, n);
  if (beta_ratio == 0) return ImitationRule<Scalar>::fermi(0);
  if (beta0 == 0)
    throw analysis_error("beta_reference is zero; beta_ratio is undefined");
  return ImitationRule<Scalar>::fermi(beta_ratio / beta0);
}

}  // namespace netsel
