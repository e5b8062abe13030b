#include <atomic>
#include <string>

#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"

namespace bidclub::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(BIDCLUB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

// -1 means "auto".
std::atomic<int> forced{-1};

Isa current() noexcept {
  const int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

}  // namespace

const char* to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(BIDCLUB_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return current(); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    fail(ErrorKind::invalid_parameter, std::string("kernel variant unavailable: ") + to_string(isa));
  }
  forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() noexcept { forced.store(-1, std::memory_order_relaxed); }

void ActionSums::merge(const ActionSums& other) {
  if (other.size() != size()) fail(ErrorKind::invalid_parameter, "action sums differ in size");
  detail::row_sum_scalar(1.0, other.utility.data(), utility.data(), size());
  detail::row_sum_scalar(1.0, other.utility_sq.data(), utility_sq.data(), size());
  detail::row_sum_scalar(1.0, other.gain.data(), gain.data(), size());
  detail::row_sum_scalar(1.0, other.gain_sq.data(), gain_sq.data(), size());
}

void accumulate_action_utilities(std::span<const double> scores,
                                 std::span<const double> second_scores,
                                 std::span<const double> payments, const TrialScene& scene,
                                 ActionSums& sums) {
  const std::size_t n = scores.size();
  if (payments.size() != n || sums.size() != n ||
      (!second_scores.empty() && second_scores.size() != n)) {
    fail(ErrorKind::invalid_parameter, "kernel inputs differ in length");
  }
  const double* second = second_scores.empty() ? nullptr : second_scores.data();

  detail::AccumulateFn fn = detail::accumulate_scalar;
  switch (current()) {
#if defined(BIDCLUB_HAVE_AVX2)
    case Isa::avx2: fn = detail::accumulate_avx2; break;
#endif
#if defined(BIDCLUB_HAVE_NEON)
    case Isa::neon: fn = detail::accumulate_neon; break;
#endif
    default: break;
  }
  fn(scores.data(), second, payments.data(), n, scene, sums.utility.data(),
     sums.utility_sq.data(), sums.gain.data(), sums.gain_sq.data());
}

void weighted_row_sum(double weight, std::span<const double> row, std::span<double> out) {
  if (row.size() != out.size()) fail(ErrorKind::invalid_parameter, "row lengths differ");
  detail::RowSumFn fn = detail::row_sum_scalar;
  switch (current()) {
#if defined(BIDCLUB_HAVE_AVX2)
    case Isa::avx2: fn = detail::row_sum_avx2; break;
#endif
#if defined(BIDCLUB_HAVE_NEON)
    case Isa::neon: fn = detail::row_sum_neon; break;
#endif
    default: break;
  }
  fn(weight, row.data(), out.data(), row.size());
}

}  // namespace bidclub::kernels
