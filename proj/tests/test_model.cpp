#include <doctest.h>

#include <random>

#include "netsel/model.hpp"
#include "oracles.hpp"

using namespace netsel;

namespace {

NetworkParamsd reference_params(double arrival = 30, double gap = 0.0) {
  return NetworkParamsd(100, arrival, 1, gap, 0);
}

double calibrated_gap(double arrival = 30, double share = 0.68) {
  return calibrate_price_gap(100.0, arrival, 1.0, share);
}

}  // namespace

TEST_CASE("network parameters reject unstable or invalid environments") {
  CHECK_THROWS_AS(NetworkParamsd(100, 100, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParamsd(100, 120, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParamsd(0, 0.5, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParamsd(100, 0, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParamsd(100, 30, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParamsd(100, 30, 1, std::nan(""), 0), std::invalid_argument);
  CHECK_NOTHROW(NetworkParamsd(100, 30, 1, -5, 2));
}

TEST_CASE("primary utility") {
  const auto p = reference_params();
  CHECK(utility_primary(p, 0, 10) == doctest::Approx(-0.01).epsilon(1e-15));
  // full load: same delay term as a secondary user
  CHECK(utility_primary(p, 10, 10) == doctest::Approx(-1.0 / 70).epsilon(1e-15));
  for (long k = 0; k < 10; ++k) CHECK(utility_primary(p, k, 10) > utility_primary(p, k + 1, 10));
  CHECK_THROWS_AS(utility_primary(p, 11, 10), std::domain_error);
  CHECK_THROWS_AS(utility_primary(p, -1, 10), std::domain_error);
}

TEST_CASE("secondary utility") {
  const auto p = reference_params();
  CHECK(utility_secondary(p) == doctest::Approx(-0.0142857142857142857).epsilon(1e-14));
  const NetworkParamsd shifted(100, 30, 1, 0, 0.25);
  CHECK(utility_secondary(shifted) - utility_secondary(p) == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(utility_secondary(p) == utility_primary(p, 7, 7));
}

TEST_CASE("equilibrium") {
  SUBCASE("equal prices put all traffic on the primary network") {
    const auto eq = equilibrium(reference_params());
    CHECK(eq.rate_primary == 30);
    CHECK(eq.share_primary == 1);
    CHECK(eq.boundary_flag);
  }
  SUBCASE("calibrated gap gives share 0.68 and matches bisection") {
    const double gap = calibrated_gap();
    CHECK(gap == doctest::Approx(0.00172290021536252692).epsilon(1e-12));
    const auto p = reference_params(30, gap);
    const auto eq = equilibrium(p);
    CHECK(eq.share_primary == doctest::Approx(0.68).epsilon(1e-13));
    CHECK(eq.share_primary == doctest::Approx(oracle::bisect_equilibrium_share(p)).epsilon(1e-12));
    CHECK(eq.rate_primary / 30 == doctest::Approx(eq.share_primary));
    CHECK_FALSE(eq.boundary_flag);
    CHECK(critical_state(p, 10) == 7);
  }
  SUBCASE("large gap is a boundary equilibrium") {
    const auto p = reference_params(30, 1.0);
    const auto eq = equilibrium(p);
    CHECK(eq.boundary_flag);
    // everybody prefers the cheaper secondary network
    CHECK(eq.share_primary == 0);
    CHECK(oracle::bisect_equilibrium_share(p) == 0);
  }
  SUBCASE("negative gap saturates the primary network") {
    const auto eq = equilibrium(reference_params(30, -0.01));
    CHECK(eq.share_primary == 1);
    CHECK(eq.boundary_flag);
  }
  SUBCASE("degenerate denominator") {
    CHECK_THROWS_AS(equilibrium(reference_params(30, 1.0 / 70)), analysis_error);
  }
  SUBCASE("agrees with bisection on random interior instances") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
      const double c = 10 + 190 * u(rng);
      const double l = c * (0.05 + 0.9 * u(rng));
      const double a = 0.1 + 5 * u(rng);
      const double gap = calibrate_price_gap(c, l, a, 0.02 + 0.96 * u(rng));
      const NetworkParamsd p(c, l, a, gap, 0);
      CHECK(equilibrium(p).share_primary ==
            doctest::Approx(oracle::bisect_equilibrium_share(p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("critical state") {
  CHECK(ceil_population(0.68, 10) == 7);
  CHECK(ceil_population(0.68, 100) == 68);
  CHECK(ceil_population(1.0, 10) == 10);
  CHECK(ceil_population(0.0, 10) == 0);
  CHECK(ceil_population(0.681, 100) == 69);
  CHECK(critical_state(reference_params(30, 0.0), 12) == 12);
}

TEST_CASE("price-gap calibration round trip") {
  CHECK(calibrate_price_gap(100.0, 30.0, 1.0, 1.0) == 0);
  CHECK_THROWS_AS(calibrate_price_gap(100.0, 30.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(calibrate_price_gap(100.0, 30.0, 1.0, 1.2), std::domain_error);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = 1e-6 + (1 - 1e-6) * u(rng);
    const double c = 1 + 500 * u(rng);
    const double l = c * (0.01 + 0.98 * u(rng));
    const double a = 0.01 + 10 * u(rng);
    const NetworkParamsd p(c, l, a, calibrate_price_gap(c, l, a, x), 0);
    const double share = equilibrium(p).share_primary;
    CHECK(std::abs(share - x) < 1e-10);
    if (x > 0.01) CHECK(share == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("social welfare and optimum") {
  const auto p = reference_params();
  CHECK(social_welfare(p, 0.0) == doctest::Approx(30.0 / 70).epsilon(1e-12));
  CHECK(social_welfare(p, 1.0) == doctest::Approx(30.0 / 70).epsilon(1e-12));
  CHECK(social_welfare(p, 0.68) == doctest::Approx(0.39342426417803302).epsilon(1e-12));
  CHECK_THROWS_AS(social_welfare(p, 1.01), std::domain_error);

  const auto opt = social_optimum(p);
  CHECK(opt.total_delay == doctest::Approx(0.39045721866878728).epsilon(1e-12));
  CHECK(opt.share == doctest::Approx(0.54446657821974817).epsilon(1e-12));
  CHECK(social_welfare(p, opt.share) == doctest::Approx(opt.total_delay).epsilon(1e-12));
  // the literal closed form 2(sqrt(C/(C-lambda)) - 1)
  CHECK(opt.total_delay == doctest::Approx(2 * (std::sqrt(100.0 / 70) - 1)).epsilon(1e-12));

  const auto grid = oracle::grid_minimum(p, 1e-5);
  CHECK(std::abs(grid.value - opt.total_delay) < 1e-6);
  CHECK(std::abs(grid.share - opt.share) < 1e-4);

  CHECK(social_optimum(reference_params(1e-9)).total_delay < 1e-10);
}

TEST_CASE("welfare never beats the optimum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double c = 1 + 200 * u(rng);
    const NetworkParamsd p(c, c * (0.001 + 0.998 * u(rng)), 1, 0, 0);
    const double s_min = social_optimum(p).total_delay;
    for (int j = 0; j <= 100; ++j) {
      const double x = j / 100.0;
      CHECK(social_welfare(p, x) >= s_min - 1e-12);
      CHECK(poa_at(p, x) >= 1.0 - 1e-12);
    }
    const double ends = p.arrival() / (p.capacity() - p.arrival());
    CHECK(social_welfare(p, 0.0) == doctest::Approx(ends).epsilon(1e-12));
    CHECK(social_welfare(p, 1.0) == doctest::Approx(ends).epsilon(1e-12));
  }
}

TEST_CASE("price of anarchy") {
  const auto p = reference_params();
  CHECK(poa_at(p, social_optimum(p).share) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(poa_at(p, 0.68) == doctest::Approx(1.0075989003849423).epsilon(1e-12));
  CHECK(poa_at(p, 0.0) == doctest::Approx(1.0976143046671968).epsilon(1e-12));
  CHECK(poa_absorbing(p) == doctest::Approx(1.0976143046671968).epsilon(1e-12));
  CHECK(poa_absorbing(p) == doctest::Approx(poa_at(p, 0.0)).epsilon(1e-12));
  CHECK(poa_absorbing(p) == doctest::Approx(poa_at(p, 1.0)).epsilon(1e-12));
  CHECK(poa_absorbing(reference_params(35)) == doctest::Approx(1.1201736729460423).epsilon(1e-12));
  CHECK(poa_absorbing(reference_params(1e-6)) == doctest::Approx(1.0).epsilon(1e-8));

  // the unrationalised form lambda / (2 sqrt(C - lambda) (sqrt C - sqrt(C - lambda)))
  for (double l : {5.0, 30.0, 35.0, 80.0, 99.0}) {
    const double literal = l / (2 * std::sqrt(100 - l) * (10 - std::sqrt(100 - l)));
    CHECK(poa_absorbing(reference_params(l)) == doctest::Approx(literal).epsilon(1e-12));
  }
}

TEST_CASE("expected price of anarchy") {
  const auto p = reference_params();
  const long n = 10;
  Eigen::VectorXd point = Eigen::VectorXd::Zero(n + 1);
  point(0) = 1;
  CHECK(expected_poa(p, point) == doctest::Approx(poa_absorbing(p)).epsilon(1e-12));

  // a point mass where k/N equals the optimum share gives exactly 1
  const NetworkParamsd half(100, 1e-9, 1, 0, 0);  // optimum share -> 1/2
  Eigen::VectorXd middle = Eigen::VectorXd::Zero(3);
  middle(1) = 1;
  CHECK(expected_poa(half, middle) == doctest::Approx(1.0).epsilon(1e-6));

  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
  double direct = 0;
  for (long k = 0; k <= n; ++k) {
    const double x = double(k) / n;
    direct += 30 * (x / (100 - 30 * x) + (1 - x) / 70) / (n + 1);
  }
  direct /= 2 * (std::sqrt(100.0 / 70) - 1);
  CHECK(expected_poa(p, uniform) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(expected_poa(p, uniform) == doctest::Approx(1.0391534673193228).epsilon(1e-12));
  CHECK(expected_poa(p, uniform) > 1);

  Eigen::VectorXd bad = uniform * 1.01;
  CHECK_THROWS_AS(expected_poa(p, bad), std::domain_error);
}

TEST_CASE("sign structure around k*") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 300; ++i) {
    const double c = 10 + 200 * u(rng);
    const double l = c * (0.05 + 0.9 * u(rng));
    const double a = 0.1 + 3 * u(rng);
    const NetworkParamsd p(c, l, a, calibrate_price_gap(c, l, a, 0.03 + 0.94 * u(rng)), 0);
    const long n = 2 + static_cast<long>(300 * u(rng));
    const long k_star = critical_state(p, n);
    const double secondary = utility_secondary(p);
    for (long k = 0; k <= n; ++k) {
      if (k < k_star) CHECK(utility_primary(p, k, n) > secondary);
      else CHECK(utility_primary(p, k, n) <= secondary);
    }
  }
}

TEST_CASE("long double instantiation") {
  const NetworkParams<long double> p(100.0L, 30.0L, 1.0L,
                                     calibrate_price_gap(100.0L, 30.0L, 1.0L, 0.68L), 0.0L);
  CHECK(static_cast<double>(equilibrium(p).share_primary) == doctest::Approx(0.68).epsilon(1e-15));
  CHECK(static_cast<double>(social_optimum(p).total_delay) ==
        doctest::Approx(0.39045721866878728).epsilon(1e-15));
}
