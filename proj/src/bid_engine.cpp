#include "bidclub/bid_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"
#include "bidclub/quadrature.hpp"

namespace bidclub {

namespace {

constexpr int kMaxDepth = 60;

double integer_power(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

void check_value(double v, const ValuationDistribution& valuations) {
  if (!valuations.contains(v)) {
    std::ostringstream msg;
    msg << "valuation " << v << " outside support [" << valuations.lower() << ", "
        << valuations.upper() << "]";
    fail(ErrorKind::invalid_parameter, msg.str());
  }
}

}  // namespace

double equilibrium_bid_fixed(double v, int n, const ValuationDistribution& valuations) {
  check_value(v, valuations);
  if (n < 2) fail(ErrorKind::invalid_parameter, "fixed bidder count must be >= 2");

  const double lo = valuations.lower();
  const double top = valuations.cdf(v);
  if (!(top > 0.0)) return lo;

  const int power = n - 1;
  auto ratio = [&](double u) { return integer_power(valuations.cdf(u) / top, power); };
  // Tolerance scales with the integration interval so that tiny valuations
  // keep full relative precision.
  const double span = valuations.upper() - lo;
  const double tolerance = kQuadratureTolerance * (v - lo) / span;
  const double shading = adaptive_simpson(ratio, lo, v, tolerance, kMaxDepth);
  return std::clamp(v - shading, lo, v);
}

double equilibrium_bid_mixture(double v, const CountDistribution& counts,
                               const ValuationDistribution& valuations) {
  counts.require_auction_counts("bidder count distribution");
  check_value(v, valuations);
  double bid = 0.0;
  for (int n = std::max(2, counts.min_count()); n <= counts.max_count(); ++n) {
    bid += counts.pmf(n) * equilibrium_bid_fixed(v, n, valuations);
  }
  return bid;
}

// ---------------------------------------------------------------------------

BidEvaluator::BidEvaluator(ValuationDistribution valuations)
    : valuations_(std::move(valuations)), cached_value_(std::numeric_limits<double>::quiet_NaN()) {}

double BidEvaluator::fixed(double v, int n) {
  if (v != cached_value_) {
    cached_value_ = v;
    std::fill(cache_.begin(), cache_.end(), std::numeric_limits<double>::quiet_NaN());
  }
  const auto slot = static_cast<std::size_t>(n);
  if (slot >= cache_.size()) cache_.resize(slot + 1, std::numeric_limits<double>::quiet_NaN());
  if (std::isnan(cache_[slot])) cache_[slot] = equilibrium_bid_fixed(v, n, valuations_);
  return cache_[slot];
}

double BidEvaluator::mixture(double v, const CountDistribution& counts) {
  counts.require_auction_counts("bidder count distribution");
  double bid = 0.0;
  for (int n = std::max(2, counts.min_count()); n <= counts.max_count(); ++n) {
    bid += counts.pmf(n) * fixed(v, n);
  }
  return bid;
}

double BidEvaluator::inverse_mixture(double bid, const CountDistribution& counts) {
  double lo = valuations_.lower();
  double hi = valuations_.upper();
  if (bid <= lo) return lo;
  if (mixture(hi, counts) < bid) return std::numeric_limits<double>::infinity();
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mixture(mid, counts) < bid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------

BidTable::BidTable(const ValuationDistribution& valuations, std::vector<double> grid,
                   int max_count)
    : grid_(std::move(grid)), max_count_(max_count) {
  if (max_count_ < 2) fail(ErrorKind::invalid_parameter, "bid table needs max_count >= 2");
  rows_.resize(static_cast<std::size_t>(max_count_ - 1) * grid_.size());
  for (int n = 2; n <= max_count_; ++n) {
    auto* row = rows_.data() + static_cast<std::size_t>(n - 2) * grid_.size();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      row[i] = equilibrium_bid_fixed(grid_[i], n, valuations);
    }
  }
}

std::span<const double> BidTable::row(int n) const {
  if (n < 2 || n > max_count_) fail(ErrorKind::invalid_parameter, "bid table row out of range");
  return {rows_.data() + static_cast<std::size_t>(n - 2) * grid_.size(), grid_.size()};
}

std::vector<double> BidTable::mixture(const CountDistribution& counts) const {
  counts.require_auction_counts("bidder count distribution");
  if (counts.max_count() > max_count_) {
    fail(ErrorKind::invalid_parameter, "count distribution exceeds bid table range");
  }
  std::vector<double> out(grid_.size(), 0.0);
  for (int n = std::max(2, counts.min_count()); n <= counts.max_count(); ++n) {
    kernels::weighted_row_sum(counts.pmf(n), row(n), out);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<MonotonicityViolation> verify_dominance_monotonicity(
    const ValuationDistribution& valuations, std::span<const DominancePair> pairs,
    std::span<const double> grid) {
  int max_count = 2;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!dominates(pairs[p].higher, pairs[p].lower)) {
      std::ostringstream msg;
      msg << "pair " << p << " is not ordered by tail-mass dominance";
      fail(ErrorKind::precondition_violation, msg.str());
    }
    max_count = std::max({max_count, pairs[p].higher.max_count(), pairs[p].lower.max_count()});
  }

  const BidTable table(valuations, std::vector<double>(grid.begin(), grid.end()), max_count);
  std::vector<MonotonicityViolation> violations;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto lower = table.mixture(pairs[p].lower);
    const auto higher = table.mixture(pairs[p].higher);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= valuations.lower()) continue;
      if (!(lower[i] < higher[i])) violations.push_back({p, grid[i], lower[i], higher[i]});
    }
  }
  return violations;
}

}  // namespace bidclub
