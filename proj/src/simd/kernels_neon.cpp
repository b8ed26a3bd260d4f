#include "fissure/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace fissure::simd {

namespace {

constexpr std::size_t kLanes = 4;

void stick_differentials_neon(const float* center, const std::ptrdiff_t* left,
                              const std::ptrdiff_t* middle, const std::ptrdiff_t* right,
                              std::size_t length, std::size_t count, float* perp_max,
                              float* perp_min, float* par) {
  const float32x4_t vn = vdupq_n_f32(static_cast<float>(length));
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float* p = center + i;
    float32x4_t sum_l = vdupq_n_f32(0.0f);
    float32x4_t sum_m = vdupq_n_f32(0.0f);
    float32x4_t sum_r = vdupq_n_f32(0.0f);
    for (std::size_t j = 0; j < length; ++j) {
      sum_l = vaddq_f32(sum_l, vld1q_f32(p + left[j]));
      sum_m = vaddq_f32(sum_m, vld1q_f32(p + middle[j]));
      sum_r = vaddq_f32(sum_r, vld1q_f32(p + right[j]));
    }
    const float32x4_t u_l = vdivq_f32(sum_l, vn);
    const float32x4_t u_m = vdivq_f32(sum_m, vn);
    const float32x4_t u_r = vdivq_f32(sum_r, vn);
    float32x4_t acc = vdupq_n_f32(0.0f);
    for (std::size_t j = 0; j < length; ++j) {
      const float32x4_t d = vsubq_f32(vld1q_f32(p + middle[j]), u_m);
      acc = vaddq_f32(acc, vmulq_f32(d, d));
    }
    const float32x4_t dl = vsubq_f32(u_m, u_l);
    const float32x4_t dr = vsubq_f32(u_m, u_r);
    const uint32x4_t dl_lt = vcltq_f32(dl, dr);
    vst1q_f32(perp_max + i, vbslq_f32(dl_lt, dr, dl));
    vst1q_f32(perp_min + i, vbslq_f32(vcltq_f32(dr, dl), dr, dl));
    vst1q_f32(par + i, vsqrtq_f32(vdivq_f32(acc, vn)));
  }
  if (i < count) {
    scalar_kernels().stick_differentials(center + i, left, middle, right, length, count - i,
                                         perp_max + i, perp_min + i, par + i);
  }
}

void strength_update_neon(const float* perp_max, const float* perp_min, const float* par,
                          float kappa, std::int32_t orientation, std::size_t count,
                          float* best_max, float* best_min, std::int32_t* best_index) {
  const float32x4_t k = vdupq_n_f32(kappa);
  const int32x4_t idx = vdupq_n_s32(orientation);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float32x4_t penalty = vmulq_f32(k, vld1q_f32(par + i));
    const float32x4_t i_max = vsubq_f32(vld1q_f32(perp_max + i), penalty);
    const float32x4_t i_min = vsubq_f32(vld1q_f32(perp_min + i), penalty);
    const float32x4_t cur_max = vld1q_f32(best_max + i);
    const uint32x4_t better = vcgtq_f32(i_max, cur_max);
    vst1q_f32(best_max + i, vbslq_f32(better, i_max, cur_max));
    vst1q_s32(best_index + i, vbslq_s32(better, idx, vld1q_s32(best_index + i)));
    const float32x4_t cur_min = vld1q_f32(best_min + i);
    vst1q_f32(best_min + i, vbslq_f32(vcgtq_f32(i_min, cur_min), i_min, cur_min));
  }
  if (i < count) {
    scalar_kernels().strength_update(perp_max + i, perp_min + i, par + i, kappa, orientation,
                                     count - i, best_max + i, best_min + i, best_index + i);
  }
}

void fuse3_neon(const float* a, const float* b, const float* c, std::size_t count, float* out) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    const float32x4_t vc = vld1q_f32(c + i);
    const uint32x4_t a_lt_b = vcltq_f32(va, vb);
    const float32x4_t lo_ab = vbslq_f32(a_lt_b, va, vb);
    const float32x4_t hi_ab = vbslq_f32(a_lt_b, vb, va);
    const uint32x4_t hi_lt_c = vcltq_f32(hi_ab, vc);
    const float32x4_t hi = vbslq_f32(hi_lt_c, vc, hi_ab);
    const float32x4_t hi_ab_c = vbslq_f32(hi_lt_c, hi_ab, vc);
    const float32x4_t med = vbslq_f32(vcltq_f32(lo_ab, hi_ab_c), hi_ab_c, lo_ab);
    const float32x4_t sum = vaddq_f32(vaddq_f32(va, vb), vc);
    const float32x4_t fused = vmulq_f32(sum, vdivq_f32(med, hi));
    vst1q_f32(out + i, vbslq_f32(vcgtq_f32(hi, zero), fused, zero));
  }
  if (i < count) scalar_kernels().fuse3(a + i, b + i, c + i, count - i, out + i);
}

}  // namespace

const KernelTable* neon_kernels() {
  static constexpr KernelTable table{Isa::neon, stick_differentials_neon, strength_update_neon,
                                     fuse3_neon};
  return &table;
}

}  // namespace fissure::simd

#else

namespace fissure::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace fissure::simd

#endif
