#include "bidclub/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "bidclub/error.hpp"

namespace bidclub {

namespace {

double bisect_inverse(const ValuationDistribution& dist, double q) {
  double lo = dist.lower();
  double hi = dist.upper();
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (dist.cdf(mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ValuationDistribution ValuationDistribution::from_cdf(std::string name, double lower, double upper,
                                                      Fn cdf, Fn pdf) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    fail(ErrorKind::invalid_parameter, "valuation support must be a bounded interval lo < hi");
  }
  if (!cdf || !pdf) {
    fail(ErrorKind::invalid_parameter, "valuation distribution needs both cdf and pdf");
  }
  ValuationDistribution d;
  d.name_ = std::move(name);
  d.lower_ = lower;
  d.upper_ = upper;
  d.cdf_ = std::move(cdf);
  d.pdf_ = std::move(pdf);
  return d;
}

double ValuationDistribution::cdf(double v) const {
  if (v <= lower_) return 0.0;
  if (v >= upper_) return 1.0;
  return cdf_(v);
}

double ValuationDistribution::pdf(double v) const {
  if (v < lower_ || v > upper_) return 0.0;
  return pdf_(v);
}

double ValuationDistribution::inverse_cdf(double q) const {
  if (q <= 0.0) return lower_;
  if (q >= 1.0) return upper_;
  return inverse_ ? inverse_(q) : bisect_inverse(*this, q);
}

ValuationDistribution uniform_valuations() {
  ValuationDistribution d;
  d.name_ = "uniform";
  d.lower_ = 0.0;
  d.upper_ = 1.0;
  d.exponent_ = 1.0;
  d.cdf_ = [](double v) { return v; };
  d.pdf_ = [](double) { return 1.0; };
  d.inverse_ = [](double q) { return q; };
  return d;
}

ValuationDistribution power_valuations(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::invalid_parameter, "power valuation exponent must be > 0");
  }
  ValuationDistribution d;
  std::ostringstream name;
  name << "power(" << alpha << ")";
  d.name_ = name.str();
  d.lower_ = 0.0;
  d.upper_ = 1.0;
  d.exponent_ = alpha;
  d.cdf_ = [alpha](double v) { return std::pow(v, alpha); };
  d.pdf_ = [alpha](double v) { return alpha * std::pow(v, alpha - 1.0); };
  d.inverse_ = [alpha](double q) { return std::pow(q, 1.0 / alpha); };
  return d;
}

// ---------------------------------------------------------------------------

CountDistribution::CountDistribution(int min_count, std::vector<double> probabilities)
    : min_count_(min_count), probabilities_(std::move(probabilities)) {
  if (min_count_ < 0) {
    fail(ErrorKind::invalid_parameter, "count distribution min_count must be >= 0");
  }
  if (probabilities_.empty()) {
    fail(ErrorKind::invalid_parameter, "count distribution needs at least one entry");
  }
  double total = 0.0;
  for (double p : probabilities_) {
    if (!std::isfinite(p) || p < 0.0) {
      fail(ErrorKind::invalid_parameter, "count probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    std::ostringstream msg;
    msg.precision(15);
    msg << "count probabilities sum to " << total << ", expected 1";
    fail(ErrorKind::invalid_parameter, msg.str());
  }
}

CountDistribution CountDistribution::point_mass(int count) {
  return CountDistribution(count, {1.0});
}

double CountDistribution::pmf(int count) const noexcept {
  if (count < min_count_ || count > max_count()) return 0.0;
  return probabilities_[static_cast<std::size_t>(count - min_count_)];
}

int CountDistribution::max_support() const noexcept {
  for (int c = max_count(); c > min_count_; --c) {
    if (pmf(c) > kPmfTolerance) return c;
  }
  return min_count_;
}

int CountDistribution::min_support() const noexcept {
  for (int c = min_count_; c < max_count(); ++c) {
    if (pmf(c) > kPmfTolerance) return c;
  }
  return max_count();
}

void CountDistribution::require_auction_counts(const std::string& what) const {
  if (pmf(0) + pmf(1) > kPmfTolerance) {
    fail(ErrorKind::invalid_parameter, what + " must put no mass on counts 0 and 1");
  }
}

double CountDistribution::mean() const noexcept {
  double m = 0.0;
  for (int c = min_count_; c <= max_count(); ++c) m += c * pmf(c);
  return m;
}

CountDistribution CountDistribution::shifted(int offset) const {
  return CountDistribution(min_count_ + offset, probabilities_);
}

CountDistribution CountDistribution::mixture(double lambda, const CountDistribution& a,
                                             const CountDistribution& b) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    fail(ErrorKind::invalid_parameter, "mixture weight must lie in [0, 1]");
  }
  const int lo = std::min(a.min_count(), b.min_count());
  const int hi = std::max(a.max_count(), b.max_count());
  std::vector<double> probs(static_cast<std::size_t>(hi - lo + 1));
  for (int c = lo; c <= hi; ++c) {
    probs[static_cast<std::size_t>(c - lo)] = lambda * a.pmf(c) + (1.0 - lambda) * b.pmf(c);
  }
  return CountDistribution(lo, std::move(probs));
}

// ---------------------------------------------------------------------------

namespace {

CountDistribution make_club_counts(std::vector<double> probabilities) {
  if (probabilities.size() < 2) {
    fail(ErrorKind::invalid_parameter, "gamma_A: kappa (maximum club size) must be >= 2");
  }
  return CountDistribution(1, std::move(probabilities));
}

}  // namespace

ClubSizeDistribution::ClubSizeDistribution(std::vector<double> probabilities)
    : counts_(make_club_counts(std::move(probabilities))) {
  if (counts_.pmf(1) >= 1.0 - kPmfTolerance) {
    fail(ErrorKind::invalid_parameter, "gamma_A(1) must be < 1");
  }
}

// ---------------------------------------------------------------------------

double tail_mass(const CountDistribution& p, int i) noexcept {
  double tail = 0.0;
  for (int c = p.max_count(); c >= std::max(i, p.min_count()); --c) tail += p.pmf(c);
  return tail;
}

bool dominates(const CountDistribution& hi, const CountDistribution& lo) noexcept {
  const int top = std::max(hi.max_count(), lo.max_count()) + 1;
  int first_difference = -1;
  for (int i = 0; i <= top; ++i) {
    if (std::abs(tail_mass(hi, i) - tail_mass(lo, i)) > kPmfTolerance) {
      first_difference = i;
      break;
    }
  }
  if (first_difference < 0) return false;

  const int hi_top = hi.max_support();
  for (int i = first_difference; i <= top; ++i) {
    const double gap = tail_mass(hi, i) - tail_mass(lo, i);
    if (i <= hi_top) {
      if (!(gap > kPmfTolerance)) return false;
    } else if (std::abs(gap) > kPmfTolerance) {
      return false;
    }
  }
  return true;
}

CountDistribution convolve(const CountDistribution& a, const CountDistribution& b) {
  const auto pa = a.probabilities();
  const auto pb = b.probabilities();
  std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) out[i + j] += pa[i] * pb[j];
  }
  // Unnormalised on purpose; the constructor rejects drift above 1e-12.
  return CountDistribution(a.min_count() + b.min_count(), std::move(out));
}

CountDistribution compose_count_distribution(int announced, int own_club,
                                             const ClubSizeDistribution& club_sizes) {
  if (announced < 2) {
    fail(ErrorKind::invalid_parameter, "announced registrant count must be >= 2");
  }
  if (own_club < 1 || own_club > club_sizes.kappa()) {
    fail(ErrorKind::invalid_parameter, "own club size must lie in [1, kappa]");
  }
  CountDistribution others = club_sizes.counts();
  for (int draw = 2; draw < announced; ++draw) others = convolve(others, club_sizes.counts());
  return others.shifted(own_club);
}

}  // namespace bidclub
