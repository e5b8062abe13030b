#include <arm_neon.h>

#include "bidclub/kernels.hpp"

namespace bidclub::kernels::detail {

void accumulate_neon(const double* scores, const double* second_scores, const double* payments,
                     std::size_t count, const TrialScene& scene, double* utility,
                     double* utility_sq, double* gain, double* gain_sq) {
  const float64x2_t threshold = vdupq_n_f64(scene.threshold);
  const float64x2_t second_threshold = vdupq_n_f64(scene.second_threshold);
  const float64x2_t tie = vdupq_n_f64(scene.tie_share);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t value = vdupq_n_f64(scene.value);
  const float64x2_t baseline = vdupq_n_f64(scene.baseline);

  std::size_t j = 0;
  for (; j + 2 <= count; j += 2) {
    const float64x2_t s = vld1q_f64(scores + j);
    const uint64x2_t above = vcgtq_f64(s, threshold);
    const uint64x2_t level = vceqq_f64(s, threshold);
    float64x2_t win = vbslq_f64(above, one, vbslq_f64(level, tie, zero));
    if (second_scores != nullptr) {
      const uint64x2_t ok = vcgtq_f64(vld1q_f64(second_scores + j), second_threshold);
      win = vbslq_f64(ok, win, zero);
    }
    const float64x2_t u = vmulq_f64(win, vsubq_f64(value, vld1q_f64(payments + j)));
    const float64x2_t d = vsubq_f64(u, baseline);
    vst1q_f64(utility + j, vaddq_f64(vld1q_f64(utility + j), u));
    vst1q_f64(utility_sq + j, vaddq_f64(vld1q_f64(utility_sq + j), vmulq_f64(u, u)));
    vst1q_f64(gain + j, vaddq_f64(vld1q_f64(gain + j), d));
    vst1q_f64(gain_sq + j, vaddq_f64(vld1q_f64(gain_sq + j), vmulq_f64(d, d)));
  }
  if (j < count) {
    accumulate_scalar(scores + j, second_scores != nullptr ? second_scores + j : nullptr,
                      payments + j, count - j, scene, utility + j, utility_sq + j, gain + j,
                      gain_sq + j);
  }
}

void row_sum_neon(double weight, const double* row, double* out, std::size_t count) {
  const float64x2_t w = vdupq_n_f64(weight);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), vmulq_f64(w, vld1q_f64(row + i))));
  }
  if (i < count) row_sum_scalar(weight, row + i, out + i, count - i);
}

}  // namespace bidclub::kernels::detail
