#pragma once

// Data-parallel inner loops used by the Monte Carlo experiments and the bid
// tables. Every kernel has a scalar reference implementation; vector variants
// are selected at runtime and must reproduce the scalar results bit for bit.
// That holds because lanes never mix: each output element sees the same
// sequence of IEEE operations (no FMA contraction) in every variant.

#include <cstddef>
#include <span>
#include <vector>

namespace bidclub::kernels {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa) noexcept;

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Best available variant unless overridden with force_isa().
Isa active_isa() noexcept;

/// Pins dispatch to `isa`; throws invalid_parameter when unavailable.
void force_isa(Isa isa);

/// Returns to automatic selection.
void reset_isa() noexcept;

/// Per-trial inputs shared by every action in a grid.
struct TrialScene {
  double value = 0.0;  ///< deviator's valuation
  /// Action j wins when score[j] > threshold; score[j] == threshold wins
  /// with probability tie_share (accumulated as an expectation).
  double threshold = 0.0;
  double tie_share = 0.0;
  /// When secondary scores are supplied, winning also needs
  /// second_score[j] > second_threshold.
  double second_threshold = 0.0;
  /// Utility of the prescribed action this trial; gains are measured
  /// against it with common random numbers.
  double baseline = 0.0;
};

/// Running sums per action: utility, squared utility, gain over the
/// baseline, squared gain.
struct ActionSums {
  explicit ActionSums(std::size_t actions = 0)
      : utility(actions, 0.0), utility_sq(actions, 0.0), gain(actions, 0.0), gain_sq(actions, 0.0) {}

  std::size_t size() const noexcept { return utility.size(); }
  void merge(const ActionSums& other);

  std::vector<double> utility;
  std::vector<double> utility_sq;
  std::vector<double> gain;
  std::vector<double> gain_sq;
};

/// Adds one trial to `sums`. A winning action j earns value - payments[j].
/// `second_scores` may be empty.
void accumulate_action_utilities(std::span<const double> scores,
                                 std::span<const double> second_scores,
                                 std::span<const double> payments, const TrialScene& scene,
                                 ActionSums& sums);

/// out[i] += weight * row[i]
void weighted_row_sum(double weight, std::span<const double> row, std::span<double> out);

namespace detail {

using AccumulateFn = void (*)(const double* scores, const double* second_scores,
                              const double* payments, std::size_t count,
                              const TrialScene& scene, double* utility, double* utility_sq,
                              double* gain, double* gain_sq);
using RowSumFn = void (*)(double weight, const double* row, double* out, std::size_t count);

void accumulate_scalar(const double* scores, const double* second_scores, const double* payments,
                       std::size_t count, const TrialScene& scene, double* utility,
                       double* utility_sq, double* gain, double* gain_sq);
void row_sum_scalar(double weight, const double* row, double* out, std::size_t count);

#if defined(BIDCLUB_HAVE_AVX2)
void accumulate_avx2(const double* scores, const double* second_scores, const double* payments,
                     std::size_t count, const TrialScene& scene, double* utility,
                     double* utility_sq, double* gain, double* gain_sq);
void row_sum_avx2(double weight, const double* row, double* out, std::size_t count);
#endif

#if defined(BIDCLUB_HAVE_NEON)
void accumulate_neon(const double* scores, const double* second_scores, const double* payments,
                     std::size_t count, const TrialScene& scene, double* utility,
                     double* utility_sq, double* gain, double* gain_sq);
void row_sum_neon(double weight, const double* row, double* out, std::size_t count);
#endif

}  // namespace detail

}  // namespace bidclub::kernels
