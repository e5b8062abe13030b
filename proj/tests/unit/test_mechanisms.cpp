#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"
#include "bidclub/mechanisms.hpp"

using namespace bidclub;

TEST_CASE("first-price auction") {
  const std::vector<Bid> bids{{1, 0.3}, {2, 0.7}, {3, 0.5}};
  const auto out = run_first_price(bids, 9);
  CHECK(out.winner == 2);
  CHECK(out.transfers_to_center.at(2) == 0.7);
  CHECK(out.transfers_to_center.at(1) == 0.0);
  CHECK(out.allocation.at(2) == 1);
  CHECK(out.allocation.at(3) == 0);
  CHECK(out.winner_payment() == 0.7);

  CHECK_THROWS_AS(run_first_price(std::vector<Bid>{}, 1), Error);
  CHECK_THROWS_AS(run_first_price(std::vector<Bid>{{1, -0.1}}, 1), Error);
  CHECK_THROWS_AS(run_first_price(std::vector<Bid>{{1, NAN}}, 1), Error);
}

TEST_CASE("first-price ties are seeded and cover every leader") {
  const std::vector<Bid> bids{{1, 0.5}, {2, 0.5}, {3, 0.2}};
  std::set<AgentId> winners;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto a = run_first_price(bids, seed);
    CHECK(a.winner == run_first_price(bids, seed).winner);
    winners.insert(*a.winner);
  }
  CHECK(winners == std::set<AgentId>{1, 2});
}

TEST_CASE("participation revelation announces and filters") {
  const std::vector<AgentId> registrants{4, 7, 9};
  int seen = 0;
  const auto result = run_participation_revelation(
      registrants,
      [&](int announced) {
        seen = announced;
        return std::vector<Bid>{{4, 0.2}, {7, 0.4}, {8, 0.9}, {7, 0.95}};
      },
      3);
  CHECK(seen == 3);
  CHECK(result.announced == 3);
  CHECK(result.outcome.winner == 7);
  CHECK(result.outcome.transfers_to_center.at(7) == 0.4);
  REQUIRE(result.outcome.rejected.size() == 2);
  CHECK(result.outcome.rejected[0].reason == "unregistered");
  CHECK(result.outcome.rejected[1].reason == "duplicate");

  CHECK_THROWS_AS(run_participation_revelation(std::vector<AgentId>{},
                                               [](int) { return std::vector<Bid>{}; }, 1),
                  Error);
}

TEST_CASE("composed mechanism charges each winner its own rule") {
  const auto F = uniform_valuations();
  const std::vector<Declaration> decls{
      {1, 0.6, PaymentRule::fixed_count(F, 3)},
      {2, 0.4, PaymentRule::first_price()},
  };
  const auto out = run_composed_mechanism(decls, 2, 0);
  CHECK(out.winner == 1);
  CHECK(out.transfers_to_center.at(1) == doctest::Approx(0.4).epsilon(1e-12));

  const ClubSizeDistribution g({0.5, 0.5});
  const auto club = PaymentRule::club_equilibrium(F, g);
  CHECK(club(0.6, 2, 2) == doctest::Approx(0.425).epsilon(1e-12));
  const auto model = PaymentRule::count_model(F, CountDistribution(3, {0.5, 0.5}));
  CHECK(model(0.6, 7, 1) == doctest::Approx(0.425).epsilon(1e-12));
  CHECK_THROWS_AS(PaymentRule::fixed_count(F, 1), Error);
}

TEST_CASE("best response against truthful uniform opponents recovers b(v, n)") {
  // One opponent with a uniform value bidding v / 2: bid b wins with
  // probability 2b, so value 0.8 bids 0.4 and earns 0.4 * 0.8 = 0.32.
  const auto rule = PaymentRule::first_price();
  const OpponentSampler opponent = [](Rng& rng) {
    return OpponentDraw{0.5 * uniform01(rng), 1, 2};
  };
  std::vector<double> actions;
  for (int i = 0; i <= 40; ++i) actions.push_back(i / 40.0);
  actions.push_back(kAbstain);
  const auto br = best_response_value(rule, 1, opponent, 0.8, actions, 200000, 17);
  CHECK(br.action == doctest::Approx(0.4).epsilon(0.05));
  CHECK(br.expected_utility == doctest::Approx(0.32).epsilon(0.02));
  CHECK(br.estimates.back().expected_utility == 0.0);
}

TEST_CASE("discrete win probabilities sum to one") {
  for (std::size_t agents : {2u, 3u, 4u}) {
    const auto q = truthful_win_probabilities(21, agents);
    double total = 0.0;
    for (double x : q) total += x / 21.0;
    CHECK(total == doctest::Approx(1.0 / agents).epsilon(1e-13));
  }
}

TEST_CASE("discrete composed game is truthful for every schedule position") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  DiscreteComposedGame game{grid, {}};
  for (double pos : {0.0, 0.5, 1.0}) game.schedules.push_back(discrete_equilibrium_schedule(grid, 3, pos));
  const auto search = exhaustive_deviation_search(game);
  CHECK(search.max_gain <= 1e-12);

  // Exchanging the other agents' schedules leaves agent 0's utility unchanged.
  DiscreteComposedGame swapped = game;
  std::swap(swapped.schedules[1], swapped.schedules[2]);
  CHECK(std::abs(truthful_expected_utility(game, 0) - truthful_expected_utility(swapped, 0)) <= 1e-12);
}

TEST_CASE("discrete schedule converges to the continuous bid") {
  const auto F = uniform_valuations();
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(i / 400.0);
  const auto t = discrete_equilibrium_schedule(grid, 3, 0.5);
  CHECK(t[300] == doctest::Approx(equilibrium_bid_fixed(0.75, 3, F)).epsilon(1e-2));
}

TEST_CASE("a non-truthful schedule is caught") {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  DiscreteComposedGame game{grid, {grid, grid}};  // pay your declaration: shading pays
  CHECK(exhaustive_deviation_search(game).max_gain > 0.01);
}
