#pragma once

#include <array>
#include <cstdint>

#include "fissure/volume.hpp"

namespace fissure {

/// Euler characteristic of the cubical complex formed by the true voxels
/// as closed unit cubes: vertices - edges - faces + cubes, i.e.
/// objects - tunnels + cavities for 26-connected objects.
std::int64_t euler_characteristic(const BinaryVolume& q);

/// 3x3x3 neighbourhood, index dx+1 + 3(dy+1) + 9(dz+1); centre is 13.
using Neighbourhood = std::array<std::uint8_t, 27>;

Neighbourhood neighbourhood(const BinaryVolume& q, std::size_t x, std::size_t y, std::size_t z);

/// Change (x8) in the local Euler sum of the 8 octants around the centre
/// when the centre voxel is removed; 0 means Euler invariant.
int euler_change_x8(const Neighbourhood& n);

/// Exactly one 26-connected object component among the 26 neighbours.
bool single_neighbour_component(const Neighbourhood& n);

/// Removing the centre preserves topology (26-object / 6-background).
bool is_simple_point(const Neighbourhood& n);

/// Object voxel with exactly one 26-neighbour.
bool is_endpoint(const Neighbourhood& n);

/// Directional sub-iteration order of the thinning passes.
enum class BorderDirection { up, down, north, south, east, west };
inline constexpr std::array<BorderDirection, 6> kBorderOrder = {
    BorderDirection::up,    BorderDirection::down, BorderDirection::north,
    BorderDirection::south, BorderDirection::east, BorderDirection::west};

/// Topology-preserving curve thinning: repeated directional passes that
/// delete simple, Euler-invariant, non-endpoint border voxels until stable.
BinaryVolume thin_3d(const BinaryVolume& q);

}  // namespace fissure
