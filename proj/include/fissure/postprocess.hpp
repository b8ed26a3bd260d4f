#pragma once

#include <vector>

#include "fissure/volume.hpp"

namespace fissure {

struct PostprocessParams {
  double shape_ratio = 0.5;               ///< T_s; 2D components with W/H >= T_s are removed
  std::size_t skel_min_component = 8;     ///< pruned-skeleton components kept as fissure
  std::size_t repair_big_threshold = 500; ///< residual objects this large count as clutter
  std::size_t final_min_component = 100;  ///< size floor of the final fissure components

  void validate() const;
};

/// Second-moment ellipse of a 2D pixel set (pixel extent included, as
/// regionprops does). major >= minor > 0.
struct ShapeStats {
  double major = 0.0;  ///< H
  double minor = 0.0;  ///< W
  std::size_t pixel_count = 0;

  [[nodiscard]] double ratio() const { return major > 0.0 ? minor / major : 1.0; }
};

struct Pixel {
  double u;
  double v;
};

ShapeStats ellipse_axes(const std::vector<Pixel>& pixels);

/// Labels 8-connected components of one slice; `removed` lists the labels
/// whose W/H reached `shape_ratio`.
struct SliceShapeResult {
  Image2D<std::uint8_t> kept;
  std::vector<ShapeStats> components;  ///< index = label - 1
  std::vector<std::int32_t> removed;   ///< sorted labels
};

SliceShapeResult shape_measure_slice(const Image2D<std::uint8_t>& slice, double shape_ratio);

/// Applies shape_measure_slice to every sagittal slice (Q in the pipeline).
BinaryVolume shape_measure_filter(const BinaryVolume& patch, const PostprocessParams& p);

struct SkeletonVolume {
  BinaryVolume skeleton;
  std::vector<std::size_t> removed_branch_points;  ///< sorted voxel indices
};

SkeletonVolume skeletonize_3d(const BinaryVolume& q);

/// Voxels whose closed 3x3x3 neighbourhood holds >= 4 skeleton voxels.
std::vector<std::size_t> find_branch_points(const BinaryVolume& skeleton);

/// Flags all branch points first, then removes them together.
SkeletonVolume remove_branch_points(const SkeletonVolume& sk);

/// 26-connected pruned-skeleton components with >= skel_min_component voxels.
BinaryVolume select_candidates(const SkeletonVolume& sk, const PostprocessParams& p);

/// Re-adds removed branch points touching the candidate set, to a fixpoint.
BinaryVolume fill_holes(const BinaryVolume& candidate, const SkeletonVolume& sk);

/// Simultaneous BFS inside q from fissure (F) and clutter (C) seeds, 26-
/// connected, F winning ties; voxels no front reaches are C. Returns the
/// F-labelled voxels.
BinaryVolume restore_thickness(const BinaryVolume& q, const BinaryVolume& fissure_skel,
                               const BinaryVolume& clutter_skel);

/// Q_L = Q - Q_s; drop its large objects; union the rest with Q_s; keep
/// the final components of at least final_min_component voxels.
BinaryVolume repair_fissures(const BinaryVolume& q, const BinaryVolume& q_s,
                             const PostprocessParams& p);

struct PostprocessResult {
  BinaryVolume shape_filtered;  ///< Q
  BinaryVolume skeleton;        ///< Q_k
  BinaryVolume pruned;          ///< Q_k without branch points
  BinaryVolume fissure_skeleton;
  BinaryVolume fissure;         ///< Q_s
  BinaryVolume final_mask;
};

PostprocessResult postprocess(const BinaryVolume& patch, const PostprocessParams& p);

}  // namespace fissure
