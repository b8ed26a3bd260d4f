#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fissure/volume.hpp"

namespace fissure {

using Vec3 = std::array<double, 3>;

struct PlaneSpec {
  Vec3 point{};
  Vec3 normal{1.0, 0.0, 0.0};
  double thickness_vox = 1.0;
  float intensity = 0.0f;
};

/// Tube of constant radius around a polyline (capsule segments: rounded ends).
struct TubeSpec {
  std::vector<Vec3> polyline;
  double radius_vox = 1.0;
  float intensity = 0.0f;
};

/// Axis-aligned box; hollow boxes rasterize only their `wall_vox` thick shell.
struct BoxSpec {
  Vec3 lo{};
  Vec3 hi{};
  double wall_vox = 0.0;  ///< 0 = solid
  float intensity = 0.0f;
};

struct TorusSpec {
  Vec3 center{};
  double major_radius = 8.0;
  double minor_radius = 3.0;  ///< ring lies in the xy plane
  float intensity = 0.0f;
};

struct PhantomSpec {
  std::string name;
  Dims dims{32, 32, 32};
  Spacing spacing{};
  std::vector<PlaneSpec> planes;
  std::vector<TubeSpec> tubes;
  std::vector<BoxSpec> boxes;
  std::vector<TorusSpec> tori;
  float background = -850.0f;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;

  /// Known junction points of tube networks (voxel coordinates).
  std::vector<Vec3> junctions;
};

struct Phantom {
  ScalarVolume volume;
  BinaryVolume plane_truth;
  BinaryVolume tube_truth;
  BinaryVolume solid_truth;  ///< boxes and tori
  BinaryVolume lung_mask;    ///< whole volume
  std::size_t clipped_structures = 0;

  /// Union of every truth class.
  [[nodiscard]] BinaryVolume all_truth() const;
};

/// Background, then structures in order (later ones overwrite), then
/// Gaussian noise from a counter-based generator keyed by (seed, voxel).
Phantom generate(const PhantomSpec& spec);

/// Structure intensity offset above background.
inline constexpr float kPhantomContrast = 400.0f;

/// SOLID_CUBE, HOLLOW_BOX, TORUS, STRAIGHT_TUBE, Y_TUBE, OBLIQUE_PLANE, COMPOSITE.
std::vector<PhantomSpec> canonical_suite();
PhantomSpec canonical_phantom(const std::string& name);

/// Standard normal deviate for (seed, counter); independent of call order.
double counter_normal(std::uint64_t seed, std::uint64_t counter);

}  // namespace fissure
