#include "bidclub/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"
#include "bidclub/stats.hpp"

namespace bidclub {

namespace {

std::size_t pick_uniform(std::size_t n, std::uint64_t seed) {
  if (n == 1) return 0;
  Rng rng(seed);
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

double AuctionOutcome::winner_payment() const {
  if (!winner) return 0.0;
  double total = 0.0;
  if (auto it = transfers_to_center.find(*winner); it != transfers_to_center.end()) {
    total += it->second;
  }
  if (auto it = transfers_to_coordinator.find(*winner); it != transfers_to_coordinator.end()) {
    total += it->second;
  }
  return total;
}

AuctionOutcome run_first_price(std::span<const Bid> bids, std::uint64_t seed) {
  if (bids.empty()) fail(ErrorKind::no_participants, "first-price auction received no bids");
  double best = -1.0;
  std::vector<std::size_t> leaders;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const double a = bids[i].amount;
    if (!std::isfinite(a) || a < 0.0) {
      fail(ErrorKind::invalid_parameter, "bid amounts must be finite and nonnegative");
    }
    if (a > best) {
      best = a;
      leaders.assign(1, i);
    } else if (a == best) {
      leaders.push_back(i);
    }
  }
  const Bid& top = bids[leaders[pick_uniform(leaders.size(), seed)]];

  AuctionOutcome outcome;
  outcome.winner = top.agent;
  for (const Bid& b : bids) {
    outcome.allocation[b.agent] = 0;
    outcome.transfers_to_center[b.agent] = 0.0;
  }
  outcome.allocation[top.agent] = 1;
  outcome.transfers_to_center[top.agent] = top.amount;
  return outcome;
}

RevelationResult run_participation_revelation(
    std::span<const AgentId> registrants,
    const std::function<std::vector<Bid>(int announced)>& bid_phase, std::uint64_t seed) {
  if (registrants.empty()) fail(ErrorKind::no_participants, "no agents registered");
  const std::set<AgentId> registered(registrants.begin(), registrants.end());
  const int announced = static_cast<int>(registered.size());

  std::vector<Bid> accepted;
  std::vector<RejectedBid> rejected;
  std::set<AgentId> seen;
  for (const Bid& b : bid_phase(announced)) {
    if (!registered.contains(b.agent)) {
      rejected.push_back({b.agent, b.amount, "unregistered"});
    } else if (!seen.insert(b.agent).second) {
      rejected.push_back({b.agent, b.amount, "duplicate"});
    } else {
      accepted.push_back(b);
    }
  }
  if (accepted.empty()) fail(ErrorKind::no_participants, "no bids from registered agents");

  RevelationResult result{announced, run_first_price(accepted, seed)};
  result.outcome.rejected = std::move(rejected);
  return result;
}

// ---------------------------------------------------------------------------

PaymentRule PaymentRule::first_price() {
  return PaymentRule("first-price", [](double declared, int, int) { return declared; });
}

PaymentRule PaymentRule::fixed_count(ValuationDistribution valuations, int bidders) {
  if (bidders < 2) fail(ErrorKind::invalid_parameter, "fixed-count rule needs >= 2 bidders");
  std::ostringstream name;
  name << "equilibrium(n=" << bidders << ")";
  return PaymentRule(name.str(), [valuations = std::move(valuations), bidders](double declared,
                                                                              int, int) {
    return equilibrium_bid_fixed(declared, bidders, valuations);
  });
}

PaymentRule PaymentRule::count_model(ValuationDistribution valuations, CountDistribution counts) {
  counts.require_auction_counts("payment rule count model");
  return PaymentRule("equilibrium(P)", [valuations = std::move(valuations),
                                        counts = std::move(counts)](double declared, int, int) {
    return equilibrium_bid_mixture(declared, counts, valuations);
  });
}

PaymentRule PaymentRule::club_equilibrium(ValuationDistribution valuations,
                                          ClubSizeDistribution club_sizes) {
  return PaymentRule("equilibrium(P^{n,s})",
                     [valuations = std::move(valuations), club_sizes = std::move(club_sizes)](
                         double declared, int announced, int signal) {
                       return equilibrium_bid_mixture(
                           declared, compose_count_distribution(announced, signal, club_sizes),
                           valuations);
                     });
}

AuctionOutcome run_composed_mechanism(std::span<const Declaration> declarations, int announced,
                                      std::uint64_t seed) {
  if (declarations.empty()) fail(ErrorKind::no_participants, "composed mechanism received no declarations");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> leaders;
  for (std::size_t i = 0; i < declarations.size(); ++i) {
    const double d = declarations[i].value;
    if (!std::isfinite(d)) fail(ErrorKind::invalid_parameter, "declarations must be finite");
    if (d > best) {
      best = d;
      leaders.assign(1, i);
    } else if (d == best) {
      leaders.push_back(i);
    }
  }
  const Declaration& top = declarations[leaders[pick_uniform(leaders.size(), seed)]];

  AuctionOutcome outcome;
  outcome.winner = top.agent;
  for (const Declaration& d : declarations) {
    outcome.allocation[d.agent] = 0;
    outcome.transfers_to_center[d.agent] = 0.0;
  }
  outcome.allocation[top.agent] = 1;
  outcome.transfers_to_center[top.agent] = top.rule(top.value, announced, top.signal);
  return outcome;
}

// ---------------------------------------------------------------------------

BestResponse best_response_value(const PaymentRule& rule, int signal,
                                 const OpponentSampler& opponents, double value,
                                 std::span<const double> actions, std::size_t trials,
                                 std::uint64_t seed) {
  if (actions.empty()) fail(ErrorKind::invalid_parameter, "best response needs a nonempty action grid");
  if (trials < 1) fail(ErrorKind::invalid_parameter, "best response needs at least one trial");

  const std::vector<double> scores(actions.begin(), actions.end());
  std::map<int, std::vector<double>> payments_by_count;
  auto payments_for = [&](int announced) -> const std::vector<double>& {
    auto [it, inserted] = payments_by_count.try_emplace(announced);
    if (inserted) {
      it->second.reserve(actions.size());
      for (double a : actions) {
        it->second.push_back(std::isnan(a) ? 0.0 : rule(a, announced, signal));
      }
    }
    return it->second;
  };

  kernels::ActionSums sums(actions.size());
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(trial_seed(seed, t));
    const OpponentDraw draw = opponents(rng);
    kernels::TrialScene scene;
    scene.value = value;
    scene.threshold = draw.max_bid;
    scene.tie_share = 1.0 / (1.0 + std::max(draw.tied_at_max, 0));
    kernels::accumulate_action_utilities(scores, {}, payments_for(draw.announced), scene, sums);
  }

  BestResponse best;
  best.expected_utility = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(trials);
  for (std::size_t j = 0; j < actions.size(); ++j) {
    ActionEstimate e;
    e.action = actions[j];
    e.expected_utility = sums.utility[j] / n;
    e.standard_error = MeanAccumulator::standard_error(trials, sums.utility[j], sums.utility_sq[j]);
    if (e.expected_utility > best.expected_utility) {
      best.action = e.action;
      best.expected_utility = e.expected_utility;
      best.standard_error = e.standard_error;
    }
    best.estimates.push_back(e);
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<double> truthful_win_probabilities(std::size_t grid_size, std::size_t agents) {
  if (grid_size == 0 || agents == 0) fail(ErrorKind::invalid_parameter, "empty discrete game");
  const std::size_t others = agents - 1;
  const double cell = 1.0 / static_cast<double>(grid_size);
  std::vector<double> q(grid_size, 0.0);
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double below = static_cast<double>(j) * cell;
    double binom = 1.0;
    for (std::size_t tied = 0; tied <= others; ++tied) {
      q[j] += binom * std::pow(cell, static_cast<double>(tied)) *
              std::pow(below, static_cast<double>(others - tied)) / static_cast<double>(tied + 1);
      binom = binom * static_cast<double>(others - tied) / static_cast<double>(tied + 1);
    }
  }
  return q;
}

std::vector<double> discrete_equilibrium_schedule(std::span<const double> grid,
                                                  std::size_t agents, double position) {
  if (!(position >= 0.0 && position <= 1.0)) {
    fail(ErrorKind::invalid_parameter, "schedule position must lie in [0, 1]");
  }
  const auto q = truthful_win_probabilities(grid.size(), agents);
  std::vector<double> schedule(grid.size());
  double expected_payment = grid[0] * q[0];
  schedule[0] = grid[0];
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double price = grid[j - 1] + position * (grid[j] - grid[j - 1]);
    expected_payment += price * (q[j] - q[j - 1]);
    schedule[j] = expected_payment / q[j];
  }
  return schedule;
}

double interim_utility(const DiscreteComposedGame& game, std::size_t agent, std::size_t value,
                       std::size_t declared) {
  const std::size_t g = game.grid.size();
  const std::size_t others = game.agents() - 1;
  const double surplus = game.grid[value] - game.schedules[agent][declared];

  // Odometer over the other agents' value indices.
  std::vector<std::size_t> profile(others, 0);
  double total = 0.0;
  std::size_t profiles = 0;
  while (true) {
    std::size_t top = 0;
    std::size_t tied = 0;
    for (std::size_t idx : profile) {
      if (idx > top) {
        top = idx;
        tied = 1;
      } else if (idx == top) {
        ++tied;
      }
    }
    if (others == 0 || declared > top) {
      total += surplus;
    } else if (declared == top) {
      total += surplus / static_cast<double>(tied + 1);
    }
    ++profiles;

    std::size_t pos = 0;
    while (pos < others && ++profile[pos] == g) profile[pos++] = 0;
    if (pos == others) break;
  }
  return total / static_cast<double>(profiles);
}

double truthful_expected_utility(const DiscreteComposedGame& game, std::size_t agent) {
  double total = 0.0;
  for (std::size_t v = 0; v < game.grid.size(); ++v) total += interim_utility(game, agent, v, v);
  return total / static_cast<double>(game.grid.size());
}

DeviationSearchResult exhaustive_deviation_search(const DiscreteComposedGame& game) {
  DeviationSearchResult best;
  for (std::size_t i = 0; i < game.agents(); ++i) {
    for (std::size_t v = 0; v < game.grid.size(); ++v) {
      const double truthful = interim_utility(game, i, v, v);
      for (std::size_t d = 0; d < game.grid.size(); ++d) {
        if (d == v) continue;
        const double gain = interim_utility(game, i, v, d) - truthful;
        if (gain > best.max_gain) best = {gain, i, v, d};
      }
    }
  }
  return best;
}

}  // namespace bidclub
