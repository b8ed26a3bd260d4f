#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fissure/volume.hpp"

namespace fissure {

enum class ElementType { u8, i16, u16, f32 };

ElementType parse_element_type(const std::string& name);
std::size_t element_size(ElementType type);

/// Geometry and storage type for headerless raw files.
struct RawLayout {
  Dims dims;
  Spacing spacing;
  ElementType type = ElementType::f32;
};

/// Loads a MetaImage (.mhd + detached data file) or, when `raw` is given,
/// a headerless little-endian raw file. Integer types convert to float
/// without rescaling.
ScalarVolume load_volume(const std::filesystem::path& path,
                         const std::optional<RawLayout>& raw = std::nullopt);

/// Any nonzero voxel becomes true.
BinaryVolume load_mask(const std::filesystem::path& path,
                       const std::optional<RawLayout>& raw = std::nullopt);

/// Writes `<stem>.mhd` and `<stem>.raw` next to each other. `path` may name
/// either file or the bare stem. Float volumes are MET_FLOAT, masks MET_UCHAR.
void write_volume(const ScalarVolume& v, const std::filesystem::path& path);
void write_volume(const BinaryVolume& v, const std::filesystem::path& path);

/// output[i] = v[i] inside the mask, `fill` elsewhere.
ScalarVolume apply_mask(const ScalarVolume& v, const BinaryVolume& mask, float fill = -1000.0f);

BinaryVolume threshold_mask(const ScalarVolume& v, float value);

}  // namespace fissure
