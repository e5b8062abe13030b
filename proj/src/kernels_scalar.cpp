#include "bidclub/kernels.hpp"

namespace bidclub::kernels::detail {

void accumulate_scalar(const double* scores, const double* second_scores, const double* payments,
                       std::size_t count, const TrialScene& scene, double* utility,
                       double* utility_sq, double* gain, double* gain_sq) {
  for (std::size_t j = 0; j < count; ++j) {
    double win = scores[j] > scene.threshold ? 1.0
                 : scores[j] == scene.threshold ? scene.tie_share
                                                : 0.0;
    if (second_scores != nullptr && !(second_scores[j] > scene.second_threshold)) win = 0.0;
    const double u = win * (scene.value - payments[j]);
    const double d = u - scene.baseline;
    utility[j] += u;
    utility_sq[j] += u * u;
    gain[j] += d;
    gain_sq[j] += d * d;
  }
}

void row_sum_scalar(double weight, const double* row, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] += weight * row[i];
}

}  // namespace bidclub::kernels::detail
