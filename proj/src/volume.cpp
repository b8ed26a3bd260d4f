#include "fissure/volume.hpp"

#include <algorithm>

namespace fissure {

std::string to_string(ViewAxis axis) {
  switch (axis) {
    case ViewAxis::sagittal:
      return "sagittal";
    case ViewAxis::coronal:
      return "coronal";
    case ViewAxis::axial:
      return "axial";
  }
  return "unknown";
}

ViewAxis parse_view_axis(const std::string& name) {
  if (name == "sagittal" || name == "S" || name == "x") return ViewAxis::sagittal;
  if (name == "coronal" || name == "C" || name == "y") return ViewAxis::coronal;
  if (name == "axial" || name == "A" || name == "z") return ViewAxis::axial;
  throw InputError("unknown view axis '" + name + "'");
}

SliceGeometry slice_geometry(const Dims& d, ViewAxis axis) {
  switch (axis) {
    case ViewAxis::sagittal:
      return {d.ny, d.nz, d.nx};
    case ViewAxis::coronal:
      return {d.nx, d.nz, d.ny};
    case ViewAxis::axial:
    default:
      return {d.nx, d.ny, d.nz};
  }
}

std::size_t count_true(const BinaryVolume& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

namespace {

template <typename Op>
BinaryVolume combine(const BinaryVolume& a, const BinaryVolume& b, const char* what, Op op) {
  require_same_grid(a, b, what);
  BinaryVolume out(a.dims(), a.spacing());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = op(a[i] != 0, b[i] != 0) ? 1 : 0;
  }
  return out;
}

}  // namespace

BinaryVolume mask_or(const BinaryVolume& a, const BinaryVolume& b) {
  return combine(a, b, "mask_or", [](bool x, bool y) { return x || y; });
}

BinaryVolume mask_and(const BinaryVolume& a, const BinaryVolume& b) {
  return combine(a, b, "mask_and", [](bool x, bool y) { return x && y; });
}

BinaryVolume mask_minus(const BinaryVolume& a, const BinaryVolume& b) {
  return combine(a, b, "mask_minus", [](bool x, bool y) { return x && !y; });
}

bool is_subset(const BinaryVolume& inner, const BinaryVolume& outer) {
  require_same_grid(inner, outer, "is_subset");
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] && !outer[i]) return false;
  }
  return true;
}

}  // namespace fissure
