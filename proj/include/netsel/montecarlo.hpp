#pragma once

// Seeded simulation of the birth-death imitation process. Replica r draws
// from the base xoshiro256++ stream advanced by r jumps of 2^128, so
// replicas never share random numbers and results do not depend on how
// replicas are spread across threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "netsel/chain.hpp"

namespace netsel {

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    // splitmix64 expansion of the seed
    for (auto& word : state_) {
      seed += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = seed;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  static constexpr const char* name() { return "xoshiro256++ (splitmix64 seeding, 2^128 jump per replica)"; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Advances the stream by 2^128 draws.
  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
        0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (const std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b))
          for (int i = 0; i < 4; ++i) acc[i] ^= state_[i];
        (*this)();
      }
    }
    state_ = acc;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

struct UniformInterior {};

struct SimulationSpec {
  std::uint64_t seed = 1;
  long steps = 1'000'000;
  std::optional<long> burn_in;  // defaults to 10 N^2
  long replicas = 1;
  std::variant<long, UniformInterior> initial_state = UniformInterior{};
  long decimate = 0;            // trajectory of replica 0 every `decimate` events; 0 = none
  unsigned threads = 1;

  long burn_in_for(long n) const { return burn_in ? *burn_in : 10 * n * n; }

  void validate(long n) const {
    if (steps < 1) throw std::invalid_argument("simulation steps must be >= 1");
    if (replicas < 1) throw std::invalid_argument("simulation replicas must be >= 1");
    const long burn = burn_in_for(n);
    if (burn < 0 || burn >= steps)
      throw std::invalid_argument("simulation burn_in must satisfy 0 <= burn_in < steps (burn_in = " +
                                  std::to_string(burn) + ", steps = " + std::to_string(steps) + ")");
    if (decimate < 0) throw std::invalid_argument("simulation decimate must be >= 0");
    if (const auto* k0 = std::get_if<long>(&initial_state); k0 && (*k0 < 0 || *k0 > n))
      throw std::invalid_argument("simulation initial_state outside 0..N");
  }
};

struct OccupancyHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  OccupancyHistogram& operator+=(const OccupancyHistogram& other) {
    if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
    for (std::size_t k = 0; k < other.counts.size(); ++k) counts[k] += other.counts[k];
    total += other.total;
    return *this;
  }

  template <typename Scalar = double>
  StationaryDistribution<Scalar> normalised() const {
    Vector<Scalar> psi(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t k = 0; k < counts.size(); ++k)
      psi(static_cast<Eigen::Index>(k)) = Scalar(counts[k]) / Scalar(total);
    return {std::move(psi), DistributionKind::empirical};
  }
};

struct TrajectoryPoint {
  long event;
  long state;
};

struct SimulationResult {
  OccupancyHistogram histogram;
  std::vector<long> final_states;         // one per replica
  std::vector<TrajectoryPoint> trajectory;  // replica 0, decimated
};

// One revision event; consumes exactly one uniform draw.
template <typename Scalar>
long step(long k, const TransitionKernel<Scalar>& kernel, Xoshiro256pp& rng) {
  const double u = rng.uniform();
  const double up = static_cast<double>(kernel.up()(k));
  if (u < up) return k + 1;
  if (u < up + static_cast<double>(kernel.down()(k))) return k - 1;
  return k;
}

namespace detail {

inline std::vector<Xoshiro256pp> replica_streams(std::uint64_t seed, long replicas) {
  std::vector<Xoshiro256pp> streams;
  streams.reserve(static_cast<std::size_t>(replicas));
  Xoshiro256pp base(seed);
  for (long r = 0; r < replicas; ++r) {
    streams.push_back(base);
    base.jump();
  }
  return streams;
}

inline long initial_state(const SimulationSpec& spec, long n, Xoshiro256pp& rng) {
  if (const auto* k0 = std::get_if<long>(&spec.initial_state)) return *k0;
  return 1 + static_cast<long>(rng.uniform() * double(n - 1));
}

// Runs body(r) for every replica, splitting replicas into contiguous blocks.
template <typename Body>
void for_each_replica(long replicas, unsigned threads, Body&& body) {
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicas)));
  if (workers == 1) {
    for (long r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::vector<std::jthread> pool;
  const long block = (replicas + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const long begin = static_cast<long>(w) * block;
    const long end = std::min(replicas, begin + block);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (long r = begin; r < end; ++r) body(r);
    });
  }
}

}  // namespace detail

template <typename Scalar>
SimulationResult run(const SimulationSpec& spec, const TransitionKernel<Scalar>& kernel) {
  const long n = kernel.n();
  spec.validate(n);
  const long burn = spec.burn_in_for(n);
  auto streams = detail::replica_streams(spec.seed, spec.replicas);

  std::vector<OccupancyHistogram> per_replica(static_cast<std::size_t>(spec.replicas));
  std::vector<long> finals(static_cast<std::size_t>(spec.replicas));
  std::vector<TrajectoryPoint> trajectory;

  detail::for_each_replica(spec.replicas, spec.threads, [&](long r) {
    Xoshiro256pp& rng = streams[static_cast<std::size_t>(r)];
    OccupancyHistogram& hist = per_replica[static_cast<std::size_t>(r)];
    hist.counts.assign(static_cast<std::size_t>(n + 1), 0);
    const bool record = r == 0 && spec.decimate > 0;
    long k = detail::initial_state(spec, n, rng);
    if (record) trajectory.push_back({0, k});
    for (long e = 1; e <= spec.steps; ++e) {
      k = step(k, kernel, rng);
      if (e > burn) ++hist.counts[static_cast<std::size_t>(k)];
      if (record && e % spec.decimate == 0) trajectory.push_back({e, k});
    }
    hist.total = static_cast<std::uint64_t>(spec.steps - burn);
    finals[static_cast<std::size_t>(r)] = k;
  });

  SimulationResult out;
  out.histogram.counts.assign(static_cast<std::size_t>(n + 1), 0);
  for (const auto& h : per_replica) out.histogram += h;
  out.final_states = std::move(finals);
  out.trajectory = std::move(trajectory);
  return out;
}

struct AbsorptionFrequency {
  double fraction_at_0;
  double fraction_at_n;
  double fraction_unabsorbed;
  double mean_steps;     // over absorbed replicas
  long replicas;
  bool warning;          // more than 1% of replicas never absorbed
};

// Each replica runs until it hits 0 or N, or until spec.steps events.
template <typename Scalar>
AbsorptionFrequency absorption_frequency(const SimulationSpec& spec,
                                         const TransitionKernel<Scalar>& kernel) {
  if (classify(kernel).kind != ChainKind::absorbing)
    throw analysis_error("absorption_frequency: chain is not absorbing");
  const long n = kernel.n();
  if (spec.steps < 1 || spec.replicas < 1)
    throw std::invalid_argument("absorption_frequency: steps and replicas must be >= 1");
  if (const auto* k0 = std::get_if<long>(&spec.initial_state); k0 && (*k0 < 0 || *k0 > n))
    throw std::invalid_argument("absorption_frequency: initial_state outside 0..N");
  auto streams = detail::replica_streams(spec.seed, spec.replicas);

  // outcome: 0 -> absorbed at 0, 1 -> at N, 2 -> not absorbed
  std::vector<int> outcome(static_cast<std::size_t>(spec.replicas));
  std::vector<long> taken(static_cast<std::size_t>(spec.replicas));
  detail::for_each_replica(spec.replicas, spec.threads, [&](long r) {
    Xoshiro256pp& rng = streams[static_cast<std::size_t>(r)];
    long k = detail::initial_state(spec, n, rng);
    long e = 0;
    while (k != 0 && k != n && e < spec.steps) {
      k = step(k, kernel, rng);
      ++e;
    }
    outcome[static_cast<std::size_t>(r)] = k == 0 ? 0 : (k == n ? 1 : 2);
    taken[static_cast<std::size_t>(r)] = e;
  });

  long at_zero = 0, at_n = 0, open = 0;
  double step_sum = 0;
  for (std::size_t r = 0; r < outcome.size(); ++r) {
    if (outcome[r] == 0) ++at_zero;
    else if (outcome[r] == 1) ++at_n;
    else ++open;
    if (outcome[r] != 2) step_sum += double(taken[r]);
  }
  const double total = double(spec.replicas);
  const long absorbed = at_zero + at_n;
  return {double(at_zero) / total,
          double(at_n) / total,
          double(open) / total,
          absorbed > 0 ? step_sum / double(absorbed) : 0.0,
          spec.replicas,
          double(open) / total > 0.01};
}

}  // namespace netsel
