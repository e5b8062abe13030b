#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bidclub/distributions.hpp"

namespace bidclub {

/// Absolute tolerance of the shading integral.
inline constexpr double kQuadratureTolerance = 1e-10;

/// Symmetric first-price equilibrium bid with exactly `n` bidders:
///   v - F(v)^-(n-1) * integral_lo^v F(u)^(n-1) du
/// The integral is evaluated as integral of (F(u)/F(v))^(n-1), which stays
/// well conditioned as F(v) -> 0. Returns the lower support point where
/// F(v) == 0.
double equilibrium_bid_fixed(double v, int n, const ValuationDistribution& valuations);

/// Probability-weighted sum of fixed-count bids over the support of P.
/// P must carry no mass below 2.
double equilibrium_bid_mixture(double v, const CountDistribution& counts,
                               const ValuationDistribution& valuations);

/// Memoizing evaluator for hot loops. Caches fixed-count bids for the most
/// recent valuation, so a mixture and its shifted variants share quadratures.
/// Not thread safe; use one per thread.
class BidEvaluator {
 public:
  explicit BidEvaluator(ValuationDistribution valuations);

  const ValuationDistribution& valuations() const noexcept { return valuations_; }

  double fixed(double v, int n);
  double mixture(double v, const CountDistribution& counts);

  /// Smallest valuation whose mixture bid reaches `bid`, by bisection to
  /// 1e-12. Returns +infinity when even the top of the support bids less.
  double inverse_mixture(double bid, const CountDistribution& counts);

 private:
  ValuationDistribution valuations_;
  double cached_value_;
  std::vector<double> cache_;  // indexed by n, NaN when unset
};

/// Fixed-count bids tabulated on a valuation grid. Mixture rows are formed
/// with the vectorised row-sum kernel and match equilibrium_bid_mixture
/// exactly at every grid point.
class BidTable {
 public:
  BidTable(const ValuationDistribution& valuations, std::vector<double> grid, int max_count);

  std::span<const double> grid() const noexcept { return grid_; }
  int max_count() const noexcept { return max_count_; }

  /// Bids b(v, n) at every grid point, for 2 <= n <= max_count.
  std::span<const double> row(int n) const;

  /// Mixture bids at every grid point.
  std::vector<double> mixture(const CountDistribution& counts) const;

 private:
  std::vector<double> grid_;
  int max_count_;
  std::vector<double> rows_;  // (max_count - 1) rows of grid_.size()
};

struct DominancePair {
  CountDistribution lower;
  CountDistribution higher;
};

struct MonotonicityViolation {
  std::size_t pair_index;
  double value;
  double bid_lower;
  double bid_higher;
};

/// Checks that b(v, higher) > b(v, lower) for every pair and every grid
/// value above the support bottom. Each pair must satisfy
/// dominates(higher, lower); otherwise throws precondition_violation.
std::vector<MonotonicityViolation> verify_dominance_monotonicity(
    const ValuationDistribution& valuations, std::span<const DominancePair> pairs,
    std::span<const double> grid);

}  // namespace bidclub
