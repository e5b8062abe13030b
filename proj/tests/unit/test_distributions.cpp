#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "bidclub/distributions.hpp"
#include "bidclub/error.hpp"

using namespace bidclub;

namespace {

ClubSizeDistribution half_half() { return ClubSizeDistribution({0.5, 0.5}); }

// Brute-force oracle: enumerate every tuple of (announced - 1) club sizes.
std::map<int, double> enumerate_compose(int announced, int own, const std::vector<double>& gamma) {
  std::map<int, double> out;
  const int kappa = static_cast<int>(gamma.size());
  std::vector<int> sizes(static_cast<std::size_t>(announced - 1), 1);
  while (true) {
    double p = 1.0;
    int total = own;
    for (int s : sizes) {
      p *= gamma[static_cast<std::size_t>(s - 1)];
      total += s;
    }
    out[total] += p;
    std::size_t i = 0;
    while (i < sizes.size() && ++sizes[i] > kappa) sizes[i++] = 1;
    if (i == sizes.size()) break;
  }
  return out;
}

}  // namespace

TEST_CASE("uniform and power valuations") {
  const auto u = uniform_valuations();
  CHECK(u.cdf(0.3) == doctest::Approx(0.3));
  CHECK(u.cdf(-1.0) == 0.0);
  CHECK(u.cdf(2.0) == 1.0);
  CHECK(u.inverse_cdf(0.25) == 0.25);

  const auto p = power_valuations(2.0);
  CHECK(p.cdf(0.5) == doctest::Approx(0.25));
  CHECK(p.pdf(0.5) == doctest::Approx(1.0));
  CHECK(p.inverse_cdf(0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(power_valuations(0.0), Error);
  CHECK_THROWS_AS(power_valuations(-1.0), Error);
}

TEST_CASE("custom cdf inverts by bisection") {
  const auto d = ValuationDistribution::from_cdf(
      "cubic", 1.0, 2.0, [](double v) { return std::pow(v - 1.0, 3); },
      [](double v) { return 3.0 * (v - 1.0) * (v - 1.0); });
  CHECK(d.inverse_cdf(0.125) == doctest::Approx(1.5).epsilon(1e-11));
  CHECK_THROWS_AS(ValuationDistribution::from_cdf("bad", 1.0, 1.0, [](double) { return 0.0; },
                                                  [](double) { return 0.0; }),
                  Error);
}

TEST_CASE("count distribution validation") {
  CHECK_THROWS_AS(CountDistribution(2, {0.5, 0.47}), Error);
  CHECK_THROWS_AS(CountDistribution(2, {1.2, -0.2}), Error);
  CHECK_THROWS_AS(CountDistribution(-1, {1.0}), Error);
  CHECK_NOTHROW(CountDistribution(2, {0.5, 0.5 + 5e-13}));

  const CountDistribution p(2, {0.25, 0.75});
  CHECK(p.pmf(1) == 0.0);
  CHECK(p.pmf(3) == 0.75);
  CHECK(p.mean() == doctest::Approx(2.75));
  CHECK(p.shifted(2).pmf(5) == 0.75);
  CHECK_NOTHROW(p.require_auction_counts("p"));
  CHECK_THROWS_AS(CountDistribution(1, {0.5, 0.5}).require_auction_counts("q"), Error);
}

TEST_CASE("club size distribution invariants") {
  CHECK_THROWS_WITH_AS(ClubSizeDistribution({1.0, 0.0}), "gamma_A(1) must be < 1", Error);
  CHECK_THROWS_AS(ClubSizeDistribution({1.0}), Error);
  CHECK(half_half().kappa() == 2);
}

TEST_CASE("compose examples") {
  const auto g = half_half();
  const auto p21 = compose_count_distribution(2, 1, g);
  CHECK(p21 == CountDistribution(2, {0.5, 0.5}));
  const auto p22 = compose_count_distribution(2, 2, g);
  CHECK(p22 == CountDistribution(3, {0.5, 0.5}));
  const auto p31 = compose_count_distribution(3, 1, g);
  CHECK(p31 == CountDistribution(3, {0.25, 0.5, 0.25}));
  CHECK_THROWS_AS(compose_count_distribution(1, 1, g), Error);
  CHECK_THROWS_AS(compose_count_distribution(2, 3, g), Error);
}

TEST_CASE("compose matches brute-force enumeration") {
  const std::vector<std::vector<double>> gammas{{0.5, 0.5}, {0.1, 0.6, 0.3}, {0.4, 0.1, 0.2, 0.3}};
  for (const auto& gamma : gammas) {
    const ClubSizeDistribution g(gamma);
    for (int n = 2; n <= 5; ++n) {
      for (int k = 1; k <= g.kappa(); ++k) {
        const auto composed = compose_count_distribution(n, k, g);
        const auto oracle = enumerate_compose(n, k, gamma);
        for (const auto& [m, p] : oracle) CHECK(composed.pmf(m) == doctest::Approx(p).epsilon(1e-14));
        CHECK(composed.min_support() == n + k - 1);
      }
    }
  }
}

TEST_CASE("compose(n, k) is compose(n, 1) shifted by k - 1, exactly") {
  const ClubSizeDistribution g({0.3, 0.3, 0.4});
  for (int n = 2; n <= 6; ++n) {
    const auto base = compose_count_distribution(n, 1, g);
    for (int k = 2; k <= 3; ++k) CHECK(compose_count_distribution(n, k, g) == base.shifted(k - 1));
  }
}

TEST_CASE("tail mass and dominance") {
  const CountDistribution a(2, {0.5, 0.5});
  CHECK(tail_mass(a, 0) == 1.0);
  CHECK(tail_mass(a, 3) == 0.5);
  CHECK(tail_mass(a, 4) == 0.0);

  const auto g = half_half();
  const auto p31 = compose_count_distribution(3, 1, g);
  const auto p22 = compose_count_distribution(2, 2, g);
  CHECK(dominates(p31, p22));
  CHECK_FALSE(dominates(p22, p31));
  CHECK_FALSE(dominates(p31, p31));
  // Crossing tails are not ordered.
  CHECK_FALSE(dominates(CountDistribution(2, {0.5, 0.0, 0.5}), CountDistribution(3, {1.0})));
  CHECK(dominates(CountDistribution::point_mass(4), CountDistribution::point_mass(3)));
}

TEST_CASE("property: convolution preserves mass and adds means") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto random_pmf = [&](std::size_t len) {
      std::vector<double> p(len);
      double total = 0.0;
      for (auto& x : p) total += (x = u(rng));
      for (auto& x : p) x /= total;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < len; ++i) s += p[i];
      p.back() = 1.0 - s;
      return p;
    };
    const CountDistribution a(1, random_pmf(4));
    const CountDistribution b(2, random_pmf(3));
    const auto c = convolve(a, b);
    double mass = 0.0;
    for (double p : c.probabilities()) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c.mean() == doctest::Approx(a.mean() + b.mean()).epsilon(1e-12));
    CHECK(c.min_count() == 3);
  }
}

TEST_CASE("mixture of count distributions") {
  const auto m = CountDistribution::mixture(0.25, CountDistribution::point_mass(2),
                                            CountDistribution::point_mass(4));
  CHECK(m.pmf(2) == 0.25);
  CHECK(m.pmf(3) == 0.0);
  CHECK(m.pmf(4) == 0.75);
  CHECK_THROWS_AS(CountDistribution::mixture(1.5, m, m), Error);
}
