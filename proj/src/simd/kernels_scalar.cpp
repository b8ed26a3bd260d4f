#include <algorithm>
#include <cmath>

#include "fissure/simd/kernels.hpp"

namespace fissure::simd {

namespace {

void stick_differentials_scalar(const float* center, const std::ptrdiff_t* left,
                                const std::ptrdiff_t* middle, const std::ptrdiff_t* right,
                                std::size_t length, std::size_t count, float* perp_max,
                                float* perp_min, float* par) {
  const float n = static_cast<float>(length);
  for (std::size_t i = 0; i < count; ++i) {
    const float* p = center + i;
    float sum_l = 0.0f;
    float sum_m = 0.0f;
    float sum_r = 0.0f;
    for (std::size_t j = 0; j < length; ++j) {
      sum_l += p[left[j]];
      sum_m += p[middle[j]];
      sum_r += p[right[j]];
    }
    const float u_l = sum_l / n;
    const float u_m = sum_m / n;
    const float u_r = sum_r / n;
    float acc = 0.0f;
    for (std::size_t j = 0; j < length; ++j) {
      const float d = p[middle[j]] - u_m;
      acc += d * d;
    }
    const float dl = u_m - u_l;
    const float dr = u_m - u_r;
    perp_max[i] = dl < dr ? dr : dl;
    perp_min[i] = dr < dl ? dr : dl;
    par[i] = std::sqrt(acc / n);
  }
}

void strength_update_scalar(const float* perp_max, const float* perp_min, const float* par,
                            float kappa, std::int32_t orientation, std::size_t count,
                            float* best_max, float* best_min, std::int32_t* best_index) {
  for (std::size_t i = 0; i < count; ++i) {
    const float penalty = kappa * par[i];
    const float i_max = perp_max[i] - penalty;
    const float i_min = perp_min[i] - penalty;
    if (i_max > best_max[i]) {
      best_max[i] = i_max;
      best_index[i] = orientation;
    }
    if (i_min > best_min[i]) best_min[i] = i_min;
  }
}

void fuse3_scalar(const float* a, const float* b, const float* c, std::size_t count, float* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const float lo_ab = a[i] < b[i] ? a[i] : b[i];
    const float hi_ab = a[i] < b[i] ? b[i] : a[i];
    const float hi = hi_ab < c[i] ? c[i] : hi_ab;
    const float hi_ab_c = hi_ab < c[i] ? hi_ab : c[i];
    const float med = lo_ab < hi_ab_c ? hi_ab_c : lo_ab;
    const float sum = a[i] + b[i] + c[i];
    out[i] = hi > 0.0f ? sum * (med / hi) : 0.0f;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, stick_differentials_scalar, strength_update_scalar,
                                 fuse3_scalar};
  return table;
}

}  // namespace fissure::simd
