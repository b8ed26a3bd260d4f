#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fissure/simd/kernels.hpp"
#include "fissure/volume.hpp"

namespace fissure {

/// Parameters of the oriented derivative-of-sticks filter.
struct FilterParams {
  int stick_length = 11;   ///< L, odd, >= 3
  int stick_spacing = 2;   ///< S, perpendicular offset of the flanking sticks in pixels
  float kappa = 0.7f;      ///< weight of the along-stick deviation penalty
  float threshold = 1.0f;  ///< T, minimum fused magnitude that keeps an orientation vector

  void validate() const;
  [[nodiscard]] int orientation_count() const { return 2 * (stick_length - 1); }
  [[nodiscard]] double orientation_step_deg() const { return 180.0 / orientation_count(); }
};

struct Offset2 {
  int du = 0;
  int dv = 0;
  friend bool operator==(const Offset2&, const Offset2&) = default;
  friend auto operator<=>(const Offset2&, const Offset2&) = default;
};

/// Three parallel digital sticks at one orientation. Angles are measured
/// from the slice u axis towards the v axis.
struct StickKernel {
  int index = 0;
  double theta_deg = 0.0;
  std::vector<Offset2> left;
  std::vector<Offset2> middle;
  std::vector<Offset2> right;
};

/// One kernel per orientation, theta_i = i * 180 / (2(L-1)), i = 0 .. 2(L-1)-1.
std::vector<StickKernel> build_kernels(const FilterParams& p);

/// Digital line of `length` points through the origin (DDA along the major axis).
std::vector<Offset2> digital_line(double theta_deg, int length);

struct StickDifferentials {
  Image2D<float> perp_max;  ///< max(uM - uL, uM - uR)
  Image2D<float> perp_min;  ///< min(uM - uL, uM - uR)
  Image2D<float> parallel;  ///< std. dev. along the middle stick
};

/// Samples outside the slice read the nearest in-slice pixel.
StickDifferentials stick_differentials(const Image2D<float>& slice, const StickKernel& k,
                                       const FilterParams& p,
                                       const simd::KernelTable& kt = simd::active_kernels());

struct LineStrength {
  Image2D<float> f_max;               ///< max(max_i I_max, 0)
  Image2D<float> f_min;               ///< max(max_i I_min, 0)
  Image2D<std::int32_t> orientation;  ///< argmax_i I_max, smallest index on ties
};

LineStrength line_strength(const Image2D<float>& slice, const FilterParams& p,
                           const simd::KernelTable& kt = simd::active_kernels());

struct SliceResponse {
  Image2D<float> response;            ///< F_o
  Image2D<std::int32_t> orientation;  ///< from the first (max-branch) pass
};

/// Max-branch pass on the slice, then min-branch pass on its F_max image.
SliceResponse cascade(const Image2D<float>& slice, const FilterParams& p,
                      const simd::KernelTable& kt = simd::active_kernels());

struct ViewResponse {
  ScalarVolume response;   ///< F_o per voxel
  ScalarVolume theta_deg;  ///< orientation of the strongest max-branch stick
};

/// Runs `cascade` on every slice orthogonal to `axis`, in parallel.
ViewResponse run_view(const ScalarVolume& v, ViewAxis axis, const FilterParams& p,
                      const simd::KernelTable& kt = simd::active_kernels());

/// (F_A + F_S + F_C) * median / max, zero where all three vanish.
ScalarVolume fuse_3d(const ScalarVolume& sagittal, const ScalarVolume& axial,
                     const ScalarVolume& coronal,
                     const simd::KernelTable& kt = simd::active_kernels());

/// Per-view orientation data plus the fused magnitude.
struct OrientationField {
  struct View {
    ScalarVolume response;
    ScalarVolume theta_deg;
    ScalarVolume vec_u;  ///< cos(theta) where fused > T, else 0
    ScalarVolume vec_v;  ///< sin(theta) where fused > T, else 0
  };
  std::array<View, 3> views;  ///< indexed by view_slot()
  ScalarVolume fused;

  [[nodiscard]] const View& view(ViewAxis a) const;
  View& view(ViewAxis a);
  [[nodiscard]] bool has_vector(ViewAxis a, std::size_t i) const {
    const auto& v = view(a);
    return v.vec_u[i] != 0.0f || v.vec_v[i] != 0.0f;
  }
};

std::size_t view_slot(ViewAxis a);

/// Attaches unit orientation vectors where fused > p.threshold.
OrientationField vector_field(ScalarVolume fused, std::array<ViewResponse, 3> per_view,
                              const FilterParams& p);

/// Full filter: three views, fusion, vector field. `per_view` is indexed by view_slot().
OrientationField odos_filter(const ScalarVolume& v, const FilterParams& p,
                             const simd::KernelTable& kt = simd::active_kernels());

}  // namespace fissure
