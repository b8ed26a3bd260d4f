#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fissure/volume.hpp"

namespace fissure {

enum class Connectivity3D { c6 = 6, c18 = 18, c26 = 26 };
enum class Connectivity2D { c4 = 4, c8 = 8 };

struct ComponentStats {
  std::size_t voxel_count = 0;
  std::array<std::size_t, 3> min{};  ///< bounding box, inclusive
  std::array<std::size_t, 3> max{};
  std::array<double, 3> centroid{};
};

/// Labels are contiguous from 1 in raster order of each component's first
/// voxel; background is 0. stats[0] is unused.
struct ComponentTable {
  std::vector<std::int32_t> labels;
  std::vector<ComponentStats> stats;

  [[nodiscard]] std::size_t count() const { return stats.empty() ? 0 : stats.size() - 1; }
};

ComponentTable label_components(const BinaryVolume& mask, Connectivity3D conn);

struct ComponentTable2D {
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> sizes;  ///< sizes[0] unused

  [[nodiscard]] std::size_t count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
};

ComponentTable2D label_components(const Image2D<std::uint8_t>& mask, Connectivity2D conn);

/// Keeps components whose voxel count is >= min_size.
BinaryVolume filter_components_by_size(const BinaryVolume& mask, Connectivity3D conn,
                                       std::size_t min_size);

std::size_t count_components(const BinaryVolume& mask, Connectivity3D conn);

}  // namespace fissure
