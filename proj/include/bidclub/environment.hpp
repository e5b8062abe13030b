#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "bidclub/distributions.hpp"
#include "bidclub/mechanisms.hpp"
#include "bidclub/random.hpp"

namespace bidclub {

struct EnvironmentConfig {
  CountDistribution coordinator_counts;  ///< gamma_C; no mass below 2
  ClubSizeDistribution club_sizes;       ///< gamma_A with bound kappa
  ValuationDistribution valuations;      ///< F
  bool identity_enforcement = true;

  /// Throws config errors naming the offending field.
  void validate() const;
};

struct AgentType {
  double value = 0.0;
  std::optional<int> signal;  ///< own club size; empty in no-club baselines
};

/// Agents associated with one potential coordinator. Size-1 clubs are plain
/// singleton bidders with no actual coordinator.
struct Club {
  int club_id = 0;
  std::vector<AgentId> members;

  int size() const noexcept { return static_cast<int>(members.size()); }
};

struct AuctionInstance {
  std::vector<Club> clubs;
  std::map<AgentId, AgentType> agents;
  int n_potential_coordinators = 0;

  int total_agents() const noexcept { return static_cast<int>(agents.size()); }
};

/// Draws from a count pmf. Build once, reuse per trial.
class CountSampler {
 public:
  explicit CountSampler(const CountDistribution& counts);
  int operator()(Rng& rng);

 private:
  int offset_;
  std::discrete_distribution<int> index_;
};

/// Draws the coordinator count, each club size i.i.d. and each valuation
/// i.i.d.; agent ids run 0, 1, ... in club order.
AuctionInstance sample_instance(const EnvironmentConfig& config, Rng& rng);
AuctionInstance sample_instance(const EnvironmentConfig& config, std::uint64_t seed);

/// Posterior over the total agent count given the announcement and own
/// signal.
CountDistribution belief_distribution(int announced, int own_signal,
                                      const EnvironmentConfig& config);

/// No-club environment: the agent count is drawn from `counts`, all agents
/// are singletons with null signals.
AuctionInstance baseline_stochastic_instance(const CountDistribution& counts,
                                             const ValuationDistribution& valuations, Rng& rng);
AuctionInstance baseline_stochastic_instance(const CountDistribution& counts,
                                             const ValuationDistribution& valuations,
                                             std::uint64_t seed);

}  // namespace bidclub
