#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace bidclub {

/// Sample moments accumulated as plain sums, so partial results merge by
/// addition in a fixed order.
struct MeanAccumulator {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) noexcept {
    ++count;
    sum += x;
    sum_sq += x * x;
  }

  void merge(const MeanAccumulator& other) noexcept {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }

  double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }

  /// Sample standard deviation over sqrt(count).
  double standard_error() const noexcept { return standard_error(count, sum, sum_sq); }

  static double standard_error(std::size_t n, double sum, double sum_sq) noexcept {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double variance = std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
    return std::sqrt(variance / nn);
  }
};

}  // namespace bidclub
