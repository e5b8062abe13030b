#include "bidclub/club_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"

namespace bidclub {

const char* to_string(ClubPhase phase) noexcept {
  switch (phase) {
    case ClubPhase::collecting: return "collecting";
    case ClubPhase::registered: return "registered";
    case ClubPhase::settled: return "settled";
  }
  return "unknown";
}

ClubState::ClubState(int club_id, std::vector<AgentId> invited)
    : club_id_(club_id), invited_(std::move(invited)) {
  if (invited_.size() < 2) fail(ErrorKind::invalid_parameter, "a club invites at least two agents");
  if (std::set<AgentId>(invited_.begin(), invited_.end()).size() != invited_.size()) {
    fail(ErrorKind::invalid_parameter, "club invitation lists an agent twice");
  }
}

void ClubState::record_response(AgentId agent, Response response) {
  if (phase_ != ClubPhase::collecting) {
    fail(ErrorKind::protocol_order, "responses are only accepted while collecting");
  }
  if (std::find(invited_.begin(), invited_.end(), agent) == invited_.end()) {
    std::ostringstream msg;
    msg << "agent " << agent << " was not invited to club " << club_id_;
    fail(ErrorKind::invalid_parameter, msg.str());
  }
  if (!responses_.emplace(agent, response).second) {
    std::ostringstream msg;
    msg << "agent " << agent << " already responded";
    fail(ErrorKind::protocol_order, msg.str());
  }
}

bool ClubState::all_accepted() const noexcept {
  return complete() && std::all_of(responses_.begin(), responses_.end(),
                                   [](const auto& r) { return r.second.accepted; });
}

// ---------------------------------------------------------------------------

Coordinator::Coordinator(ValuationDistribution valuations, ClubSizeDistribution club_sizes)
    : valuations_(std::move(valuations)), club_sizes_(std::move(club_sizes)) {}

const CountDistribution& Coordinator::belief(int announced, int club_size) {
  const auto key = std::make_pair(announced, club_size);
  auto it = beliefs_.find(key);
  if (it == beliefs_.end()) {
    it = beliefs_.emplace(key, compose_count_distribution(announced, club_size, club_sizes_)).first;
  }
  return it->second;
}

double Coordinator::equilibrium_bid(double value, int announced, int club_size) {
  return equilibrium_bid_mixture(value, belief(announced, club_size), valuations_);
}

std::vector<AgentId> Coordinator::registrants(ClubState& state, std::uint64_t seed) {
  if (!state.complete()) {
    std::ostringstream msg;
    msg << "club " << state.club_id() << " is missing responses";
    fail(ErrorKind::protocol_order, msg.str());
  }
  if (state.size() > club_sizes_.kappa()) {
    fail(ErrorKind::invalid_parameter, "club size exceeds kappa");
  }
  for (auto& [agent, response] : state.responses_) {
    if (!response.accepted) continue;
    const double clamped =
        std::clamp(response.declared_value, valuations_.lower(), valuations_.upper());
    if (clamped != response.declared_value || std::isnan(response.declared_value)) {
      std::ostringstream msg;
      msg << "declaration " << response.declared_value << " clamped to support";
      state.warnings_.push_back({agent, msg.str()});
      response.declared_value = std::isnan(response.declared_value) ? valuations_.lower() : clamped;
    }
  }

  if (!state.all_accepted()) {
    std::vector<AgentId> acceptors;
    for (AgentId id : state.invited()) {
      if (state.responses_.at(id).accepted) acceptors.push_back(id);
    }
    return acceptors;
  }

  if (!state.chosen_) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<AgentId> leaders;
    for (AgentId id : state.invited()) {
      const double d = state.responses_.at(id).declared_value;
      if (d > best) {
        best = d;
        leaders.assign(1, id);
      } else if (d == best) {
        leaders.push_back(id);
      }
    }
    std::size_t pick = 0;
    if (leaders.size() > 1) {
      Rng rng(seed);
      pick = std::uniform_int_distribution<std::size_t>(0, leaders.size() - 1)(rng);
    }
    state.chosen_ = leaders[pick];
  }
  return {*state.chosen_};
}

RegistrationPlan Coordinator::collect_and_register(ClubState& state, int announced,
                                                   std::uint64_t seed) {
  if (state.phase() != ClubPhase::collecting) {
    fail(ErrorKind::protocol_order, "club has already registered");
  }
  if (announced < 2) fail(ErrorKind::invalid_parameter, "announced count must be >= 2");
  const auto chosen = registrants(state, seed);

  RegistrationPlan plan;
  plan.all_accepted = state.all_accepted();
  const int k = state.size();
  if (plan.all_accepted) {
    plan.forwarded = chosen.front();
    const double mu = state.responses_.at(chosen.front()).declared_value;
    plan.registrations.push_back({chosen.front(), equilibrium_bid(mu, announced, 1)});
  } else {
    for (AgentId id : chosen) {
      const double mu = state.responses_.at(id).declared_value;
      plan.registrations.push_back({id, equilibrium_bid(mu, announced, k)});
    }
    for (AgentId id : state.invited()) {
      if (!state.responses_.at(id).accepted) plan.independent.push_back(id);
    }
  }
  state.plan_ = plan;
  state.announced_ = announced;
  state.phase_ = ClubPhase::registered;
  return plan;
}

Settlement Coordinator::settle(ClubState& state, const AuctionOutcome& outcome, int announced) {
  if (state.phase() != ClubPhase::registered) {
    fail(ErrorKind::protocol_order, "settlement requires a registered club");
  }
  if (!outcome.winner) fail(ErrorKind::protocol_order, "settlement requires a resolved auction");
  if (announced != state.announced()) {
    fail(ErrorKind::invalid_parameter, "settlement announced count differs from registration");
  }
  state.phase_ = ClubPhase::settled;

  const AgentId winner = *outcome.winner;
  const RegistrationPlan& plan = state.plan();
  const auto reg = std::find_if(plan.registrations.begin(), plan.registrations.end(),
                                [&](const Registration& r) { return r.agent == winner; });
  if (reg == plan.registrations.end()) return {};

  Settlement s;
  s.paying_agent = winner;
  s.main_auction_payment = reg->bid;
  if (plan.all_accepted) {
    const double mu = state.responses_.at(winner).declared_value;
    s.coordinator_payment = equilibrium_bid(mu, announced, state.size()) - reg->bid;
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct FalseNameChunk {
  CountSampler coordinators;
  CountSampler sizes;
  std::map<int, kernels::ActionSums> by_count;
  MeanAccumulator equilibrium;
};

}  // namespace

FalseNameResult false_name_deviation_scenario(double value, int club_size,
                                              const EnvironmentConfig& env,
                                              std::span<const double> bid_grid,
                                              std::size_t trials, std::uint64_t seed,
                                              unsigned threads) {
  if (env.identity_enforcement) {
    fail(ErrorKind::scenario_unavailable,
         "false-name scenario needs identity_enforcement = false");
  }
  if (club_size < 2 || club_size > env.club_sizes.kappa()) {
    fail(ErrorKind::invalid_parameter, "false-name deviator needs a club size in [2, kappa]");
  }
  if (!env.valuations.contains(value)) {
    fail(ErrorKind::invalid_parameter, "deviator value outside support");
  }
  if (bid_grid.empty() || trials < 1) {
    fail(ErrorKind::invalid_parameter, "false-name scenario needs bids and trials");
  }

  Coordinator coordinator(env.valuations, env.club_sizes);
  BidEvaluator evaluator(env.valuations);
  const int n_lo = std::max(2, env.coordinator_counts.min_support());
  const int n_hi = env.coordinator_counts.max_support();

  // Scores of direct bids, in value space, for each announced count n + 1.
  std::map<int, std::vector<double>> scores;
  std::map<int, double> equilibrium_payment;
  for (int n = n_lo; n <= n_hi; ++n) {
    const CountDistribution& singleton = coordinator.belief(n + 1, 1);
    auto& row = scores[n];
    for (double a : bid_grid) {
      row.push_back(std::isnan(a) ? a : evaluator.inverse_mixture(a, singleton));
    }
    equilibrium_payment[n] = coordinator.equilibrium_bid(value, n, club_size);
  }
  std::vector<double> payments;
  for (double a : bid_grid) payments.push_back(std::isnan(a) ? 0.0 : a);

  const ValuationDistribution& F = env.valuations;
  auto make = [&] {
    FalseNameChunk c{CountSampler(env.coordinator_counts), CountSampler(env.club_sizes.counts()), {}, {}};
    for (int n = n_lo; n <= n_hi; ++n) c.by_count.emplace(n, kernels::ActionSums(bid_grid.size()));
    return c;
  };
  auto body = [&](FalseNameChunk& c, std::size_t t) {
    Rng rng(trial_seed(seed, t));
    const int n = c.coordinators(rng);
    double clubmates = F.lower();
    for (int m = 1; m < club_size; ++m) clubmates = std::max(clubmates, F.inverse_cdf(uniform01(rng)));
    double others = F.lower();
    for (int c2 = 1; c2 < n; ++c2) {
      const int size = c.sizes(rng);
      for (int m = 0; m < size; ++m) others = std::max(others, F.inverse_cdf(uniform01(rng)));
    }
    const double threshold = std::max(clubmates, others);
    const double baseline = value > threshold ? value - equilibrium_payment.at(n) : 0.0;
    c.equilibrium.add(baseline);

    kernels::TrialScene scene;
    scene.value = value;
    scene.threshold = threshold;
    scene.baseline = baseline;
    kernels::accumulate_action_utilities(scores.at(n), {}, payments, scene, c.by_count.at(n));
  };
  auto merge = [](FalseNameChunk& total, FalseNameChunk& part) {
    for (auto& [n, sums] : part.by_count) total.by_count.at(n).merge(sums);
    total.equilibrium.merge(part.equilibrium);
  };
  const FalseNameChunk total = run_trials(trials, threads, make, body, merge);

  FalseNameResult result;
  result.equilibrium_utility = total.equilibrium.mean();
  result.equilibrium_stderr = total.equilibrium.standard_error();
  double u_sum = 0.0, u_sq = 0.0, g_sum = 0.0, g_sq = 0.0;
  for (const auto& [n, sums] : total.by_count) {
    const auto best = static_cast<std::size_t>(
        std::max_element(sums.utility.begin(), sums.utility.end()) - sums.utility.begin());
    result.best_bid[n + 1] = bid_grid[best];
    u_sum += sums.utility[best];
    u_sq += sums.utility_sq[best];
    g_sum += sums.gain[best];
    g_sq += sums.gain_sq[best];
  }
  const double count = static_cast<double>(trials);
  result.deviation_utility = u_sum / count;
  result.deviation_stderr = MeanAccumulator::standard_error(trials, u_sum, u_sq);
  result.gain = g_sum / count;
  result.gain_stderr = MeanAccumulator::standard_error(trials, g_sum, g_sq);
  return result;
}

}  // namespace bidclub
