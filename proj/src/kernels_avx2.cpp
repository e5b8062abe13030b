// Compiled with -mavx2 (and without -mfma). Only reached through runtime
// dispatch after a CPUID check.

#include <immintrin.h>

#include "bidclub/kernels.hpp"

namespace bidclub::kernels::detail {

void accumulate_avx2(const double* scores, const double* second_scores, const double* payments,
                     std::size_t count, const TrialScene& scene, double* utility,
                     double* utility_sq, double* gain, double* gain_sq) {
  const __m256d threshold = _mm256_set1_pd(scene.threshold);
  const __m256d second_threshold = _mm256_set1_pd(scene.second_threshold);
  const __m256d tie = _mm256_set1_pd(scene.tie_share);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d value = _mm256_set1_pd(scene.value);
  const __m256d baseline = _mm256_set1_pd(scene.baseline);

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d s = _mm256_loadu_pd(scores + j);
    const __m256d above = _mm256_cmp_pd(s, threshold, _CMP_GT_OQ);
    const __m256d level = _mm256_cmp_pd(s, threshold, _CMP_EQ_OQ);
    __m256d win = _mm256_blendv_pd(_mm256_blendv_pd(zero, tie, level), one, above);
    if (second_scores != nullptr) {
      const __m256d s2 = _mm256_loadu_pd(second_scores + j);
      win = _mm256_and_pd(win, _mm256_cmp_pd(s2, second_threshold, _CMP_GT_OQ));
    }
    const __m256d u = _mm256_mul_pd(win, _mm256_sub_pd(value, _mm256_loadu_pd(payments + j)));
    const __m256d d = _mm256_sub_pd(u, baseline);
    _mm256_storeu_pd(utility + j, _mm256_add_pd(_mm256_loadu_pd(utility + j), u));
    _mm256_storeu_pd(utility_sq + j,
                     _mm256_add_pd(_mm256_loadu_pd(utility_sq + j), _mm256_mul_pd(u, u)));
    _mm256_storeu_pd(gain + j, _mm256_add_pd(_mm256_loadu_pd(gain + j), d));
    _mm256_storeu_pd(gain_sq + j, _mm256_add_pd(_mm256_loadu_pd(gain_sq + j), _mm256_mul_pd(d, d)));
  }
  if (j < count) {
    accumulate_scalar(scores + j, second_scores != nullptr ? second_scores + j : nullptr,
                      payments + j, count - j, scene, utility + j, utility_sq + j, gain + j,
                      gain_sq + j);
  }
}

void row_sum_avx2(double weight, const double* row, double* out, std::size_t count) {
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d acc = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(acc, _mm256_mul_pd(w, _mm256_loadu_pd(row + i))));
  }
  if (i < count) row_sum_scalar(weight, row + i, out + i, count - i);
}

}  // namespace bidclub::kernels::detail
