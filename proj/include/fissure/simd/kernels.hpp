#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops of the stick filter. Every variant evaluates the
// same float operations in the same order per lane (the build disables FP
// contraction), so all variants are bitwise interchangeable.

namespace fissure::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  /// For `count` consecutive pixels starting at `center`: mean along the
  /// left/middle/right sticks (linear offsets, `length` each), then
  ///   perp_max = max(uM - uL, uM - uR), perp_min = min(...),
  ///   par = population std. dev. of the middle-stick samples.
  void (*stick_differentials)(const float* center, const std::ptrdiff_t* left,
                              const std::ptrdiff_t* middle, const std::ptrdiff_t* right,
                              std::size_t length, std::size_t count, float* perp_max,
                              float* perp_min, float* par);

  /// Folds one orientation into the running maxima of I = perp - kappa * par.
  /// best_index changes only on a strict improvement of the max branch.
  void (*strength_update)(const float* perp_max, const float* perp_min, const float* par,
                          float kappa, std::int32_t orientation, std::size_t count,
                          float* best_max, float* best_min, std::int32_t* best_index);

  /// out = (a + b + c) * median(a, b, c) / max(a, b, c), 0 where the max is 0.
  void (*fuse3)(const float* a, const float* b, const float* c, std::size_t count, float* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Best available variant, unless FISSURE_ISA=scalar|avx2|neon overrides it.
const KernelTable& active_kernels();

}  // namespace fissure::simd
