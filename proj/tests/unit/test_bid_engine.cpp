#include <doctest.h>

#include <cmath>
#include <vector>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"

using namespace bidclub;

TEST_CASE("uniform fixed-count bids match the closed form") {
  const auto F = uniform_valuations();
  CHECK(equilibrium_bid_fixed(0.6, 3, F) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(equilibrium_bid_fixed(0.7, 2, F) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(equilibrium_bid_fixed(0.0, 4, F) == 0.0);
  for (int n = 2; n <= 10; ++n) {
    for (int i = 1; i <= 100; ++i) {
      const double v = i / 100.0;
      CHECK(std::abs(equilibrium_bid_fixed(v, n, F) - (n - 1.0) / n * v) < 1e-9);
    }
  }
}

TEST_CASE("power-family bids match the closed form") {
  for (double alpha : {0.5, 2.0, 3.0}) {
    const auto F = power_valuations(alpha);
    for (int n = 2; n <= 10; ++n) {
      const double ratio = alpha * (n - 1) / (alpha * (n - 1) + 1.0);
      for (int i = 1; i <= 100; ++i) {
        const double v = i / 100.0;
        CHECK(std::abs(equilibrium_bid_fixed(v, n, F) - ratio * v) < 1e-9);
      }
    }
  }
}

TEST_CASE("tiny valuations keep relative precision") {
  const auto F = power_valuations(3.0);
  const double v = 1e-6;
  CHECK(equilibrium_bid_fixed(v, 2, F) == doctest::Approx(0.75 * v).epsilon(1e-9));
}

TEST_CASE("bid engine rejects bad input") {
  const auto F = uniform_valuations();
  CHECK_THROWS_AS(equilibrium_bid_fixed(1.5, 2, F), Error);
  CHECK_THROWS_AS(equilibrium_bid_fixed(-0.1, 2, F), Error);
  CHECK_THROWS_AS(equilibrium_bid_fixed(0.5, 1, F), Error);
  CHECK_THROWS_AS(equilibrium_bid_mixture(0.5, CountDistribution(1, {0.5, 0.5}), F), Error);
}

TEST_CASE("mixture bid examples") {
  const auto F = uniform_valuations();
  // 0.5 * 0.35 + 0.5 * 0.4666...
  CHECK(equilibrium_bid_mixture(0.7, CountDistribution(2, {0.5, 0.5}), F) ==
        doctest::Approx(0.5 * 0.35 + 0.5 * 0.7 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(equilibrium_bid_mixture(0.6, CountDistribution(3, {0.5, 0.5}), F) ==
        doctest::Approx(0.425).epsilon(1e-12));
  CHECK(equilibrium_bid_mixture(0.6, CountDistribution::point_mass(3), F) ==
        equilibrium_bid_fixed(0.6, 3, F));
}

TEST_CASE("custom distribution goes through the generic path") {
  // F(v) = v^2 on [0, 1] built from callbacks: must agree with the closed form.
  const auto F = ValuationDistribution::from_cdf(
      "square", 0.0, 1.0, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
  CHECK(equilibrium_bid_fixed(0.8, 3, F) == doctest::Approx(0.8 * 4.0 / 5.0).epsilon(1e-10));
}

TEST_CASE("evaluator caches and inverts") {
  const auto F = uniform_valuations();
  BidEvaluator eval(F);
  const CountDistribution P(2, {0.5, 0.5});
  CHECK(eval.fixed(0.6, 3) == equilibrium_bid_fixed(0.6, 3, F));
  CHECK(eval.mixture(0.6, P) == equilibrium_bid_mixture(0.6, P, F));
  const double b = eval.mixture(0.42, P);
  CHECK(eval.inverse_mixture(b, P) == doctest::Approx(0.42).epsilon(1e-11));
  CHECK(eval.inverse_mixture(0.0, P) == 0.0);
  CHECK(std::isinf(eval.inverse_mixture(0.99, P)));
}

TEST_CASE("bid table mixture equals pointwise mixture bit for bit") {
  const auto F = power_valuations(2.0);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i / 40.0);
  const BidTable table(F, grid, 7);
  const CountDistribution P(2, {0.1, 0.2, 0.3, 0.15, 0.15, 0.1});
  const auto row = table.mixture(P);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(row[i] == equilibrium_bid_mixture(grid[i], P, F));
  }
  CHECK_THROWS_AS(table.row(8), Error);
  CHECK_THROWS_AS(table.mixture(CountDistribution::point_mass(9)), Error);
}

TEST_CASE("dominance monotonicity") {
  const auto F = uniform_valuations();
  const ClubSizeDistribution g({0.5, 0.5});
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i / 50.0);
  const std::vector<DominancePair> pairs{
      {compose_count_distribution(2, 2, g), compose_count_distribution(3, 1, g)}};
  CHECK(verify_dominance_monotonicity(F, pairs, grid).empty());

  const std::vector<DominancePair> reversed{{pairs[0].higher, pairs[0].lower}};
  CHECK_THROWS_AS(verify_dominance_monotonicity(F, reversed, grid), Error);
}

TEST_CASE("property: bids lie below value and increase in v and n") {
  for (double alpha : {0.5, 1.0, 3.0}) {
    const auto F = power_valuations(alpha);
    for (int n = 2; n <= 6; ++n) {
      double prev = -1.0;
      for (int i = 1; i <= 20; ++i) {
        const double v = i / 20.0;
        const double b = equilibrium_bid_fixed(v, n, F);
        CHECK(b <= v);
        CHECK(b > prev);
        CHECK(equilibrium_bid_fixed(v, n + 1, F) > b);
        prev = b;
      }
    }
  }
}
