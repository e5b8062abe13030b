#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidclub/distributions.hpp"
#include "bidclub/random.hpp"

namespace bidclub {

using AgentId = int;

struct Bid {
  AgentId agent = 0;
  double amount = 0.0;
};

struct RejectedBid {
  AgentId agent = 0;
  double amount = 0.0;
  std::string reason;
};

struct AuctionOutcome {
  std::optional<AgentId> winner;
  std::map<AgentId, double> transfers_to_center;
  std::map<AgentId, double> transfers_to_coordinator;
  std::map<AgentId, int> allocation;
  std::vector<RejectedBid> rejected;

  /// Total paid by the winner (center plus coordinator); 0 without a winner.
  double winner_payment() const;
};

/// First-price sealed bid: highest amount wins and pays it, losers pay 0.
/// Ties are broken uniformly at random from `seed`.
AuctionOutcome run_first_price(std::span<const Bid> bids, std::uint64_t seed);

struct RevelationResult {
  int announced = 0;
  AuctionOutcome outcome;
};

/// Two-phase first price auction. The registrant count is announced to the
/// bid phase; bids from unregistered ids (or repeat bids) are discarded and
/// recorded in `outcome.rejected`.
RevelationResult run_participation_revelation(
    std::span<const AgentId> registrants,
    const std::function<std::vector<Bid>(int announced)>& bid_phase, std::uint64_t seed);

/// Payment charged to a winning agent as a function of its own declaration,
/// the announced registrant count, and its signal (own club size).
class PaymentRule {
 public:
  using Fn = std::function<double(double declared, int announced, int signal)>;

  PaymentRule(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  /// Pays the declaration itself.
  static PaymentRule first_price();
  /// b(declared, n) for a fixed bidder count, ignoring the announcement.
  static PaymentRule fixed_count(ValuationDistribution valuations, int bidders);
  /// b(declared, P) for a fixed count distribution.
  static PaymentRule count_model(ValuationDistribution valuations, CountDistribution counts);
  /// b(declared, P^{announced, signal}) built from the club size
  /// distribution; the one-stage mechanism behind the club protocol.
  static PaymentRule club_equilibrium(ValuationDistribution valuations,
                                      ClubSizeDistribution club_sizes);

  double operator()(double declared, int announced, int signal) const {
    return fn_(declared, announced, signal);
  }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

struct Declaration {
  AgentId agent = 0;
  double value = 0.0;
  PaymentRule rule;
  int signal = 1;
};

/// Highest declaration wins (ties uniform from `seed`); the winner pays its
/// own rule evaluated at (declaration, announced, signal); losers pay 0.
AuctionOutcome run_composed_mechanism(std::span<const Declaration> declarations, int announced,
                                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Monte Carlo best response

/// Marks the non-participation action in an action grid. It never wins and
/// is never charged.
inline const double kAbstain = std::numeric_limits<double>::quiet_NaN();

/// One environment draw as seen by the target agent.
struct OpponentDraw {
  double max_bid = 0.0;  ///< highest competing bid
  int tied_at_max = 1;   ///< competitors bidding exactly max_bid
  int announced = 2;     ///< registrant count announced to the target
};

using OpponentSampler = std::function<OpponentDraw(Rng&)>;

struct ActionEstimate {
  double action = 0.0;
  double expected_utility = 0.0;
  double standard_error = 0.0;
};

struct BestResponse {
  double action = 0.0;
  double expected_utility = 0.0;
  double standard_error = 0.0;
  std::vector<ActionEstimate> estimates;
};

/// Grid-search best response with common random numbers: every action is
/// scored against the same `trials` opponent draws. A winning action pays
/// `rule(action, announced, signal)`.
BestResponse best_response_value(const PaymentRule& rule, int signal,
                                 const OpponentSampler& opponents, double value,
                                 std::span<const double> actions, std::size_t trials,
                                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exact checks on a discrete valuation grid

/// Probability of winning with declaration index j when every other agent
/// declares truthfully from `grid_size` equally likely values and ties are
/// split uniformly. Closed form over the number of tied opponents.
std::vector<double> truthful_win_probabilities(std::size_t grid_size, std::size_t agents);

/// Discrete analogue of the equilibrium first-price payment: the expected
/// payment P_j = Q_j * t_j grows by (v_{j-1} + position * (v_j - v_{j-1})) *
/// (Q_j - Q_{j-1}) between adjacent grid points, starting from zero utility
/// at the bottom. Any position in [0, 1] keeps truth-telling optimal; the
/// schedule converges to b(v, agents) as the grid is refined.
std::vector<double> discrete_equilibrium_schedule(std::span<const double> grid,
                                                  std::size_t agents, double position);

/// Composed mechanism on a discrete grid: allocation to the highest
/// declaration, each agent charged its own schedule when it wins.
struct DiscreteComposedGame {
  std::vector<double> grid;                    ///< equally likely values
  std::vector<std::vector<double>> schedules;  ///< per agent, indexed by declaration

  std::size_t agents() const noexcept { return schedules.size(); }
};

/// Interim expected utility of `agent` with value index `value` declaring
/// index `declared` while everyone else is truthful; exact enumeration of
/// the other agents' value profiles.
double interim_utility(const DiscreteComposedGame& game, std::size_t agent, std::size_t value,
                       std::size_t declared);

/// Ex ante expected utility of `agent` under universal truth-telling.
double truthful_expected_utility(const DiscreteComposedGame& game, std::size_t agent);

struct DeviationSearchResult {
  double max_gain = -std::numeric_limits<double>::infinity();
  std::size_t agent = 0;
  std::size_t value = 0;
  std::size_t declared = 0;
};

/// Largest interim gain from any unilateral misreport, over all agents and
/// values.
DeviationSearchResult exhaustive_deviation_search(const DiscreteComposedGame& game);

}  // namespace bidclub
