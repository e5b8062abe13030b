#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidclub/distributions.hpp"
#include "bidclub/environment.hpp"
#include "bidclub/mechanisms.hpp"
#include "bidclub/stats.hpp"

namespace bidclub {

enum class ClubPhase { collecting, registered, settled };

const char* to_string(ClubPhase phase) noexcept;

struct Response {
  bool accepted = true;
  double declared_value = 0.0;  ///< ignored for declines
};

struct ProtocolWarning {
  AgentId agent = 0;
  std::string message;
};

struct Registration {
  AgentId agent = 0;
  double bid = 0.0;
};

struct RegistrationPlan {
  bool all_accepted = false;
  std::optional<AgentId> forwarded;         ///< the single registrant when all accept
  std::vector<Registration> registrations;  ///< bids placed by the coordinator
  std::vector<AgentId> independent;         ///< decliners, outside coordinator control
};

struct Settlement {
  double main_auction_payment = 0.0;
  double coordinator_payment = 0.0;
  std::optional<AgentId> paying_agent;
};

/// Phase machine for one club: collecting -> registered -> settled.
class ClubState {
 public:
  /// Requires at least two invited agents and no duplicates.
  ClubState(int club_id, std::vector<AgentId> invited);

  /// Throws protocol_order outside the collecting phase or on a repeated
  /// response, invalid_parameter for agents that were not invited.
  void record_response(AgentId agent, Response response);

  int club_id() const noexcept { return club_id_; }
  int size() const noexcept { return static_cast<int>(invited_.size()); }
  const std::vector<AgentId>& invited() const noexcept { return invited_; }
  const std::map<AgentId, Response>& responses() const noexcept { return responses_; }
  ClubPhase phase() const noexcept { return phase_; }
  const std::vector<ProtocolWarning>& warnings() const noexcept { return warnings_; }
  const RegistrationPlan& plan() const noexcept { return plan_; }
  int announced() const noexcept { return announced_; }

  bool complete() const noexcept { return responses_.size() == invited_.size(); }
  bool all_accepted() const noexcept;

 private:
  friend class Coordinator;

  int club_id_;
  std::vector<AgentId> invited_;
  std::map<AgentId, Response> responses_;
  ClubPhase phase_ = ClubPhase::collecting;
  std::vector<ProtocolWarning> warnings_;
  RegistrationPlan plan_;
  int announced_ = 0;
  std::optional<AgentId> chosen_;
};

/// Runs the club protocol for clubs drawn from one environment. Holds a
/// cache of composed count distributions; not shared between threads.
class Coordinator {
 public:
  Coordinator(ValuationDistribution valuations, ClubSizeDistribution club_sizes);

  /// Agents that register in the main auction for this club: the highest
  /// declaration (ties by `seed`) when all accept, otherwise every acceptor.
  /// Out-of-support declarations are clamped here, with a warning. Throws
  /// protocol_order while responses are missing.
  std::vector<AgentId> registrants(ClubState& state, std::uint64_t seed);

  /// Fixes the bids once the registrant count is announced and moves the
  /// club to the registered phase.
  RegistrationPlan collect_and_register(ClubState& state, int announced, std::uint64_t seed);

  /// 1 when all accept, otherwise the number of acceptors.
  int registration_count(ClubState& state, std::uint64_t seed) {
    return static_cast<int>(registrants(state, seed).size());
  }

  /// Transfers owed by the club after the main auction. Throws
  /// protocol_order before registration or without a resolved outcome.
  Settlement settle(ClubState& state, const AuctionOutcome& outcome, int announced);

  /// b(value, P^{announced, club_size}).
  double equilibrium_bid(double value, int announced, int club_size);

  const CountDistribution& belief(int announced, int club_size);
  const ValuationDistribution& valuations() const noexcept { return valuations_; }
  const ClubSizeDistribution& club_sizes() const noexcept { return club_sizes_; }

 private:
  ValuationDistribution valuations_;
  ClubSizeDistribution club_sizes_;
  std::map<std::pair<int, int>, CountDistribution> beliefs_;
};

/// Monte Carlo estimate of the false-name deviation: a club member declares
/// the bottom of the support to its coordinator and also bids directly in
/// the main auction under a second identity.
struct FalseNameResult {
  double equilibrium_utility = 0.0;
  double equilibrium_stderr = 0.0;
  double deviation_utility = 0.0;  ///< best bid chosen per announced count
  double deviation_stderr = 0.0;
  double gain = 0.0;
  double gain_stderr = 0.0;
  std::map<int, double> best_bid;  ///< by announced count (with the extra identity)
};

/// Throws scenario_unavailable when identity enforcement is on.
FalseNameResult false_name_deviation_scenario(double value, int club_size,
                                              const EnvironmentConfig& env,
                                              std::span<const double> bid_grid,
                                              std::size_t trials, std::uint64_t seed,
                                              unsigned threads = 0);

}  // namespace bidclub
