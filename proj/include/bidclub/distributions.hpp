#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bidclub {

/// Absolute tolerance for pmf equality and zero tests.
inline constexpr double kPmfTolerance = 1e-12;

/// Continuous, atomless distribution of private valuations on a bounded
/// support [lower, upper]. Immutable once built; copies share state.
class ValuationDistribution {
 public:
  using Fn = std::function<double(double)>;

  /// Builds a distribution from an arbitrary cdf/pdf pair. The inverse cdf
  /// is computed by bisection to 1e-12.
  static ValuationDistribution from_cdf(std::string name, double lower, double upper, Fn cdf,
                                        Fn pdf);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  const std::string& name() const noexcept { return name_; }

  double cdf(double v) const;
  double pdf(double v) const;
  double inverse_cdf(double q) const;

  bool contains(double v) const noexcept { return v >= lower_ && v <= upper_; }

  /// Family parameter for power distributions (1 for uniform), 0 for custom.
  double power_exponent() const noexcept { return exponent_; }

 private:
  friend ValuationDistribution uniform_valuations();
  friend ValuationDistribution power_valuations(double alpha);

  ValuationDistribution() = default;

  std::string name_;
  double lower_ = 0.0;
  double upper_ = 1.0;
  double exponent_ = 0.0;
  Fn cdf_;
  Fn pdf_;
  Fn inverse_;  // empty when bisection is used
};

/// Uniform valuations on [0, 1].
ValuationDistribution uniform_valuations();

/// F(v) = v^alpha on [0, 1]. Throws invalid_parameter for alpha <= 0.
ValuationDistribution power_valuations(double alpha);

/// Finite pmf over participant counts, stored densely from min_count.
class CountDistribution {
 public:
  /// Validates nonnegativity and unit mass (within 1e-12).
  CountDistribution(int min_count, std::vector<double> probabilities);

  static CountDistribution point_mass(int count);

  int min_count() const noexcept { return min_count_; }
  /// Largest count covered by the stored table (mass there may be zero).
  int max_count() const noexcept {
    return min_count_ + static_cast<int>(probabilities_.size()) - 1;
  }
  std::span<const double> probabilities() const noexcept { return probabilities_; }

  /// Probability of exactly `count`; zero outside the table.
  double pmf(int count) const noexcept;

  /// Largest count with mass above the pmf tolerance.
  int max_support() const noexcept;
  /// Smallest count with mass above the pmf tolerance.
  int min_support() const noexcept;

  /// Throws invalid_parameter when mass below 2 exceeds tolerance; main
  /// auctions always contain at least two agents.
  void require_auction_counts(const std::string& what) const;

  double mean() const noexcept;

  /// Adds a deterministic offset to every count.
  CountDistribution shifted(int offset) const;

  /// Mixture lambda * a + (1 - lambda) * b.
  static CountDistribution mixture(double lambda, const CountDistribution& a,
                                   const CountDistribution& b);

  bool operator==(const CountDistribution&) const = default;

 private:
  int min_count_;
  std::vector<double> probabilities_;
};

/// Per-coordinator club size distribution gamma_A with hard bound kappa.
class ClubSizeDistribution {
 public:
  /// `probabilities[i]` is the mass of club size i + 1; the table length is
  /// kappa. Requires kappa >= 2 and mass at size 1 strictly below 1.
  explicit ClubSizeDistribution(std::vector<double> probabilities);

  int kappa() const noexcept { return counts_.max_count(); }
  double pmf(int size) const noexcept { return counts_.pmf(size); }
  const CountDistribution& counts() const noexcept { return counts_; }

 private:
  CountDistribution counts_;
};

/// Sum of pmf at counts >= i.
double tail_mass(const CountDistribution& p, int i) noexcept;

/// True iff `lo` < `hi` under the tail-mass order: tails agree below some
/// index l and the tail of `hi` is strictly larger from l up to the top of
/// `hi`'s support. Above that point both tails must be zero.
bool dominates(const CountDistribution& hi, const CountDistribution& lo) noexcept;

/// Distribution of the sum of independent draws from `a` and `b`.
CountDistribution convolve(const CountDistribution& a, const CountDistribution& b);

/// Belief over the total agent count given `announced` registrants and own
/// club size `own_club`: own_club plus announced - 1 independent club sizes.
CountDistribution compose_count_distribution(int announced, int own_club,
                                             const ClubSizeDistribution& club_sizes);

}  // namespace bidclub
