// Compiled with -mavx2; the table is only handed out after a runtime CPU check
// in dispatch.cpp.

#include "fissure/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace fissure::simd {

namespace {

constexpr std::size_t kLanes = 8;

void stick_differentials_avx2(const float* center, const std::ptrdiff_t* left,
                              const std::ptrdiff_t* middle, const std::ptrdiff_t* right,
                              std::size_t length, std::size_t count, float* perp_max,
                              float* perp_min, float* par) {
  const float n = static_cast<float>(length);
  const __m256 vn = _mm256_set1_ps(n);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float* p = center + i;
    __m256 sum_l = _mm256_setzero_ps();
    __m256 sum_m = _mm256_setzero_ps();
    __m256 sum_r = _mm256_setzero_ps();
    for (std::size_t j = 0; j < length; ++j) {
      sum_l = _mm256_add_ps(sum_l, _mm256_loadu_ps(p + left[j]));
      sum_m = _mm256_add_ps(sum_m, _mm256_loadu_ps(p + middle[j]));
      sum_r = _mm256_add_ps(sum_r, _mm256_loadu_ps(p + right[j]));
    }
    const __m256 u_l = _mm256_div_ps(sum_l, vn);
    const __m256 u_m = _mm256_div_ps(sum_m, vn);
    const __m256 u_r = _mm256_div_ps(sum_r, vn);
    __m256 acc = _mm256_setzero_ps();
    for (std::size_t j = 0; j < length; ++j) {
      const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(p + middle[j]), u_m);
      acc = _mm256_add_ps(acc, _mm256_mul_ps(d, d));
    }
    const __m256 dl = _mm256_sub_ps(u_m, u_l);
    const __m256 dr = _mm256_sub_ps(u_m, u_r);
    _mm256_storeu_ps(perp_max + i, _mm256_max_ps(dr, dl));
    _mm256_storeu_ps(perp_min + i, _mm256_min_ps(dr, dl));
    _mm256_storeu_ps(par + i, _mm256_sqrt_ps(_mm256_div_ps(acc, vn)));
  }
  if (i < count) {
    scalar_kernels().stick_differentials(center + i, left, middle, right, length, count - i,
                                         perp_max + i, perp_min + i, par + i);
  }
}

void strength_update_avx2(const float* perp_max, const float* perp_min, const float* par,
                          float kappa, std::int32_t orientation, std::size_t count,
                          float* best_max, float* best_min, std::int32_t* best_index) {
  const __m256 k = _mm256_set1_ps(kappa);
  const __m256 idx = _mm256_castsi256_ps(_mm256_set1_epi32(orientation));
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256 penalty = _mm256_mul_ps(k, _mm256_loadu_ps(par + i));
    const __m256 i_max = _mm256_sub_ps(_mm256_loadu_ps(perp_max + i), penalty);
    const __m256 i_min = _mm256_sub_ps(_mm256_loadu_ps(perp_min + i), penalty);
    const __m256 cur_max = _mm256_loadu_ps(best_max + i);
    const __m256 better = _mm256_cmp_ps(i_max, cur_max, _CMP_GT_OQ);
    _mm256_storeu_ps(best_max + i, _mm256_blendv_ps(cur_max, i_max, better));
    const __m256 cur_idx = _mm256_loadu_ps(reinterpret_cast<const float*>(best_index + i));
    _mm256_storeu_ps(reinterpret_cast<float*>(best_index + i),
                     _mm256_blendv_ps(cur_idx, idx, better));
    const __m256 cur_min = _mm256_loadu_ps(best_min + i);
    const __m256 better_min = _mm256_cmp_ps(i_min, cur_min, _CMP_GT_OQ);
    _mm256_storeu_ps(best_min + i, _mm256_blendv_ps(cur_min, i_min, better_min));
  }
  if (i < count) {
    scalar_kernels().strength_update(perp_max + i, perp_min + i, par + i, kappa, orientation,
                                     count - i, best_max + i, best_min + i, best_index + i);
  }
}

void fuse3_avx2(const float* a, const float* b, const float* c, std::size_t count, float* out) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256 vc = _mm256_loadu_ps(c + i);
    const __m256 lo_ab = _mm256_min_ps(va, vb);
    const __m256 hi_ab = _mm256_max_ps(vb, va);
    const __m256 hi = _mm256_max_ps(vc, hi_ab);
    const __m256 hi_ab_c = _mm256_min_ps(hi_ab, vc);
    const __m256 med = _mm256_max_ps(hi_ab_c, lo_ab);
    const __m256 sum = _mm256_add_ps(_mm256_add_ps(va, vb), vc);
    const __m256 fused = _mm256_mul_ps(sum, _mm256_div_ps(med, hi));
    const __m256 positive = _mm256_cmp_ps(hi, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(out + i, _mm256_and_ps(positive, fused));
  }
  if (i < count) scalar_kernels().fuse3(a + i, b + i, c + i, count - i, out + i);
}

}  // namespace

const KernelTable* avx2_table() {
  static constexpr KernelTable table{Isa::avx2, stick_differentials_avx2, strength_update_avx2,
                                     fuse3_avx2};
  return &table;
}

}  // namespace fissure::simd

#else

namespace fissure::simd {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace fissure::simd

#endif
