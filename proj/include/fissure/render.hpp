#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fissure/volume.hpp"

namespace fissure {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kMaskColour{0, 255, 0};       // green
inline constexpr Rgb kTruthColour{255, 255, 0};    // yellow
inline constexpr Rgb kOverlapColour{128, 0, 128};  // purple

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;  ///< row-major, row 0 at the top
};

/// Grey levels map the slice's own min..max onto 0..255 (a constant slice
/// is black); mask pixels are green, truth yellow, both purple.
RgbImage render_slice(const ScalarVolume& volume, const BinaryVolume* mask,
                      const BinaryVolume* truth, ViewAxis axis, std::size_t slice);

/// 8-bit RGB PNG.
void write_png(const RgbImage& img, const std::filesystem::path& path);

}  // namespace fissure
