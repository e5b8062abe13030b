#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidclub/club_protocol.hpp"
#include "bidclub/environment.hpp"
#include "bidclub/mechanisms.hpp"

namespace bidclub {

struct ReportRow {
  std::string scenario;
  std::string statistic;
  double mean = 0.0;
  double standard_error = 0.0;
  bool pass = true;
};

/// Result of one experiment. `violations` is empty iff the experiment passed.
struct ExperimentReport {
  std::string experiment;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<ReportRow> rows;
  std::vector<std::string> violations;
  std::vector<std::string> notes;

  bool passed() const noexcept { return violations.empty(); }

  /// '#'-prefixed summary lines followed by a CSV table with header
  /// `scenario,statistic,mean,stderr,pass`. Deterministic: numbers use
  /// %.12g and nothing depends on wall-clock time.
  std::string render() const;
};

struct ExperimentOptions {
  std::size_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  ///< 0 selects hardware concurrency
  std::string config_digest;
};

/// Number of standard errors a Monte Carlo difference must exceed.
inline constexpr double kSignificance = 3.0;
/// Margin required by exact bid-level inequalities.
inline constexpr double kExactMargin = 1e-9;

// ---------------------------------------------------------------------------
// Equilibrium deviation test

enum class DeviatorRole { singleton, club_member };

struct DeviatorSpec {
  DeviatorRole role = DeviatorRole::singleton;
  int club_size = 1;                ///< k; 1 for singletons
  std::vector<double> values;       ///< deviator valuations to test
  std::size_t bid_points = 256;     ///< main-auction bid grid over the support
  std::size_t misreport_points = 64;
};

/// For every value and announced count, compares each deviation against the
/// prescribed strategy on common random numbers. Singletons choose among
/// main-auction bids and abstaining; club members among declarations to the
/// coordinator, declining and bidding, and declining and abstaining. A
/// deviation whose gain exceeds three standard errors is a violation.
/// Requires trials >= 10^4.
ExperimentReport verify_equilibrium(const EnvironmentConfig& env, const DeviatorSpec& deviator,
                                    const ExperimentOptions& options);

// ---------------------------------------------------------------------------
// Welfare comparisons

struct BidMargin {
  double value = 0.0;
  double margin = 0.0;
};

/// b(v, P^{n+k-1,1}) - b(v, P^{n,k}) on `grid`.
std::vector<BidMargin> club_vs_disbanded_margins(Coordinator& coordinator, int announced,
                                                 int club_size, std::span<const double> grid);

/// b(v, P^{n+k-1,1}) - b(v, P^{n,1}) on `grid`.
std::vector<BidMargin> nonmember_margins(Coordinator& coordinator, int announced, int club_size,
                                         std::span<const double> grid);

/// `points` evenly spaced values strictly above the bottom of the support,
/// ending at the top.
std::vector<double> interior_grid(const ValuationDistribution& valuations, std::size_t points);

/// Focal member of a size-k club under announcement n versus the same agent
/// as a singleton after the club disbands (announcement n + k - 1), on the
/// same draws. Includes the exact bid-level check on a 50-point grid.
ExperimentReport compare_club_vs_disbanded(const EnvironmentConfig& env, int club_size,
                                           int announced, const ExperimentOptions& options);

/// Singleton facing a size-k club (announcement n) versus the disbanded club
/// (announcement n + k - 1), on the same draws.
ExperimentReport compare_nonmember_welfare(const EnvironmentConfig& env, int club_size,
                                           int announced, const ExperimentOptions& options);

// ---------------------------------------------------------------------------
// Utility equivalence

/// Total paid by a winning size-k club member with value `value` after
/// running the club protocol end to end (registration, auction, settlement).
double club_path_payment(Coordinator& coordinator, double value, int announced, int club_size);

/// Club environment versus the no-club environment whose count model is
/// P^{n,k}, per value decile. Also checks the exact payment identity.
ExperimentReport verify_utility_equivalence(const EnvironmentConfig& env, int club_size,
                                            int announced, const ExperimentOptions& options);

// ---------------------------------------------------------------------------
// Full protocol simulation

struct AgentAction {
  AgentId agent = 0;
  std::string kind;  ///< "declare" to a coordinator or "bid" directly
  double amount = 0.0;
};

struct TrialRecord {
  std::size_t trial = 0;
  AuctionInstance instance;
  int announced = 0;
  std::vector<AgentAction> actions;
  AuctionOutcome outcome;
  std::map<AgentId, double> utilities;
  std::map<int, double> coordinator_revenue;  ///< by club id
  double seller_revenue = 0.0;
};

/// Plays the complete protocol on one sampled instance with every agent
/// following the prescribed strategy.
TrialRecord play_protocol(const EnvironmentConfig& env, Coordinator& coordinator,
                          std::size_t trial, std::uint64_t seed);

/// Coordinator and seller revenue over full protocol runs. Every trial must
/// leave each coordinator with nonnegative revenue; the mean must be
/// positive beyond three standard errors. The first `trace_trials` records
/// are passed to `trace` in trial order.
ExperimentReport revenue_accounting(const EnvironmentConfig& env, const ExperimentOptions& options,
                                    std::size_t trace_trials = 0,
                                    const std::function<void(const TrialRecord&)>& trace = {});

// ---------------------------------------------------------------------------
// Exact structural checks

/// Tail-mass dominance of P^{n+k-1,1} over P^{n,k} and of P^{n+k-1,1} over
/// P^{n,1}, plus strict bid monotonicity along both pairs on a 50-point
/// interior grid, for n in [2, max_announced] and k in [2, kappa].
ExperimentReport dominance_check(const EnvironmentConfig& env, int max_announced,
                                 const ExperimentOptions& options);

/// Best false-name deviation against prescribed play, per deviator value. A
/// gain beyond three standard errors is reported as a violation.
ExperimentReport false_name_experiment(const EnvironmentConfig& env, int club_size,
                                       std::span<const double> values,
                                       const ExperimentOptions& options);

}  // namespace bidclub
