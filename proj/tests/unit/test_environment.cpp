#include <doctest.h>

#include <cmath>
#include <map>

#include "bidclub/environment.hpp"
#include "bidclub/error.hpp"

using namespace bidclub;

namespace {

EnvironmentConfig reference(std::vector<double> gamma_C = {1.0}) {
  return {CountDistribution(2, std::move(gamma_C)), ClubSizeDistribution({0.5, 0.5}),
          uniform_valuations(), true};
}

}  // namespace

TEST_CASE("instances respect support arithmetic and signals") {
  const auto env = reference();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = sample_instance(env, seed);
    CHECK(inst.n_potential_coordinators == 2);
    CHECK(inst.clubs.size() == 2);
    CHECK(inst.total_agents() >= 2);
    CHECK(inst.total_agents() <= 4);
    int total = 0;
    for (const Club& c : inst.clubs) {
      total += c.size();
      for (AgentId id : c.members) CHECK(inst.agents.at(id).signal == c.size());
    }
    CHECK(total == inst.total_agents());
  }
}

TEST_CASE("same seed gives the same instance") {
  const auto env = reference({0.5, 0.5});
  const auto a = sample_instance(env, 42);
  const auto b = sample_instance(env, 42);
  REQUIRE(a.agents.size() == b.agents.size());
  for (const auto& [id, type] : a.agents) CHECK(b.agents.at(id).value == type.value);
}

TEST_CASE("club size frequencies match gamma_A within 3 SE") {
  const EnvironmentConfig env{CountDistribution::point_mass(2),
                              ClubSizeDistribution({0.2, 0.5, 0.3}), uniform_valuations(), true};
  std::map<int, int> counts;
  int clubs = 0;
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    for (const Club& c : sample_instance(env, rng).clubs) {
      ++counts[c.size()];
      ++clubs;
    }
  }
  for (int s = 1; s <= 3; ++s) {
    const double p = env.club_sizes.pmf(s);
    const double se = std::sqrt(p * (1 - p) / clubs);
    CHECK(std::abs(counts[s] / double(clubs) - p) <= 3 * se);
  }
}

TEST_CASE("distinct clubs have uncorrelated sizes") {
  const auto env = reference();
  Rng rng(8);
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto inst = sample_instance(env, rng);
    const double x = inst.clubs[0].size(), y = inst.clubs[1].size();
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(r) <= 3.0 / std::sqrt(n));
}

TEST_CASE("belief distribution examples") {
  const auto env = reference();
  CHECK(belief_distribution(2, 1, env) == CountDistribution(2, {0.5, 0.5}));
  for (int n = 2; n <= 5; ++n) CHECK(belief_distribution(n, 2, env).min_support() == n + 1);
}

TEST_CASE("empirical posterior matches compose") {
  // Condition on (announced n, own signal k) for agent 0 and tally totals.
  const EnvironmentConfig env{CountDistribution(2, {0.5, 0.5}), ClubSizeDistribution({0.5, 0.5}),
                              uniform_valuations(), true};
  std::map<std::pair<int, int>, std::map<int, int>> tallies;
  Rng rng(21);
  for (int i = 0; i < 400000; ++i) {
    const auto inst = sample_instance(env, rng);
    const int k = *inst.agents.at(0).signal;
    ++tallies[{inst.n_potential_coordinators, k}][inst.total_agents()];
  }
  for (const auto& [key, hist] : tallies) {
    int total = 0;
    for (const auto& [m, c] : hist) total += c;
    const auto belief = belief_distribution(key.first, key.second, env);
    for (int m = belief.min_count(); m <= belief.max_count(); ++m) {
      const double p = belief.pmf(m);
      const double se = std::sqrt(p * (1 - p) / total);
      const auto it = hist.find(m);
      const double freq = it == hist.end() ? 0.0 : it->second / double(total);
      CHECK(std::abs(freq - p) <= 3 * se + 1e-12);
    }
  }
}

TEST_CASE("baseline instances") {
  const auto F = uniform_valuations();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = baseline_stochastic_instance(CountDistribution::point_mass(3), F, s);
    CHECK(inst.total_agents() == 3);
    for (const auto& [id, t] : inst.agents) CHECK_FALSE(t.signal.has_value());
  }
  const CountDistribution model(3, {0.5, 0.5});
  Rng rng(2);
  int threes = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) threes += baseline_stochastic_instance(model, F, rng).total_agents() == 3;
  CHECK(std::abs(threes / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
  CHECK_THROWS_AS(baseline_stochastic_instance(CountDistribution(1, {0.5, 0.5}), F, 1), Error);
}

TEST_CASE("environment validation") {
  EnvironmentConfig bad{CountDistribution(1, {0.5, 0.5}), ClubSizeDistribution({0.5, 0.5}),
                        uniform_valuations(), true};
  CHECK_THROWS_AS(bad.validate(), Error);
}
