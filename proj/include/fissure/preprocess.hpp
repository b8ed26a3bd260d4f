#pragma once

#include <span>
#include <vector>

#include "fissure/odos.hpp"
#include "fissure/volume.hpp"

namespace fissure {

/// Half-open angular interval [start, start + width) taken modulo 180 degrees.
struct OrientationBin {
  int index = 0;
  double start_deg = 0.0;
  double width_deg = 45.0;

  [[nodiscard]] bool contains(double theta_deg) const;
};

/// n bins of width 360/n stepped by 180/n, so every angle lies in exactly two.
std::vector<OrientationBin> make_bins(int n);

struct PreprocessParams {
  int bins = 8;
  std::size_t min_3d_component = 200;
  double curvature_tolerance = 1.0;  ///< fraction of a 2D component that must lie in the bin

  void validate() const;
};

/// Voxels with a nonzero vector whose orientation lies in `bin`.
BinaryVolume partition(const OrientationField& field, ViewAxis view, const OrientationBin& bin);

/// Per slice along `view`: keep 8-connected components of `binmask` whose
/// in-bin orientation fraction reaches the curvature tolerance.
BinaryVolume curvature_filter_2d(const BinaryVolume& binmask, const OrientationField& field,
                                 ViewAxis view, const OrientationBin& bin,
                                 const PreprocessParams& p);

/// Keeps 26-connected components of at least p.min_3d_component voxels.
BinaryVolume planar_filter_3d(const BinaryVolume& binmask, const PreprocessParams& p);

BinaryVolume integrate_bins(std::span<const BinaryVolume> masks);
BinaryVolume integrate_views(const BinaryVolume& sagittal, const BinaryVolume& axial,
                             const BinaryVolume& coronal);

struct PreprocessResult {
  std::array<BinaryVolume, 3> per_view;                 ///< indexed by view_slot()
  std::array<std::vector<BinaryVolume>, 3> per_bin;     ///< filled only when requested
  BinaryVolume patch;
};

/// partition -> curvature -> planar per (view, bin), OR over bins, OR over views.
PreprocessResult preprocess(const OrientationField& field, const PreprocessParams& p,
                            bool keep_bin_masks = false);

}  // namespace fissure
