#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fissure {

/// Thrown for malformed or inconsistent inputs (files, parameters, dims).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  [[nodiscard]] std::size_t voxels() const { return nx * ny * nz; }
  [[nodiscard]] bool empty() const { return nx == 0 || ny == 0 || nz == 0; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Physical voxel size in mm.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  [[nodiscard]] bool valid() const {
    auto ok = [](double s) { return std::isfinite(s) && s > 0.0; };
    return ok(sx) && ok(sy) && ok(sz);
  }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// Axis whose fixed index defines a 2D slice.
enum class ViewAxis { sagittal, coronal, axial };

inline constexpr std::array<ViewAxis, 3> kAllViews = {ViewAxis::sagittal, ViewAxis::axial,
                                                      ViewAxis::coronal};

std::string to_string(ViewAxis axis);
ViewAxis parse_view_axis(const std::string& name);

/// Dense 3D grid stored x-fastest. Immutable sharing is safe; writers own
/// disjoint index ranges.
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  Volume(Dims dims, Spacing spacing, T fill = T{}) : dims_(dims), spacing_(spacing) {
    if (dims.empty()) {
      throw InputError("volume dimensions must be positive");
    }
    if (!spacing.valid()) {
      throw InputError("volume spacing must be finite and positive");
    }
    data_.assign(dims.voxels(), fill);
  }
  Volume(Dims dims, Spacing spacing, std::vector<T> data) : Volume(dims, spacing) {
    if (data.size() != dims.voxels()) {
      throw InputError("volume data length does not match dimensions");
    }
    data_ = std::move(data);
  }

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] const Spacing& spacing() const { return spacing_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims_.nx * (y + dims_.ny * z);
  }
  [[nodiscard]] bool contains(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && static_cast<std::size_t>(x) < dims_.nx &&
           static_cast<std::size_t>(y) < dims_.ny && static_cast<std::size_t>(z) < dims_.nz;
  }

  T& operator()(std::size_t x, std::size_t y, std::size_t z) { return data_[index(x, y, z)]; }
  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[index(x, y, z)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  [[nodiscard]] std::span<T> data() { return data_; }
  [[nodiscard]] std::span<const T> data() const { return data_; }
  [[nodiscard]] std::vector<T>& storage() { return data_; }

  [[nodiscard]] bool same_grid(const Dims& d, const Spacing& s) const {
    return dims_ == d && spacing_ == s;
  }
  template <typename U>
  [[nodiscard]] bool same_grid(const Volume<U>& other) const {
    return same_grid(other.dims(), other.spacing());
  }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Dims dims_{};
  Spacing spacing_{};
  std::vector<T> data_;
};

using ScalarVolume = Volume<float>;
/// Boolean mask; one byte per voxel holding 0 or 1.
using BinaryVolume = Volume<std::uint8_t>;

template <typename A, typename B>
void require_same_grid(const Volume<A>& a, const Volume<B>& b, const char* what) {
  if (!a.same_grid(b)) {
    throw InputError(std::string(what) + ": dimension or spacing mismatch");
  }
}

/// Row-major 2D image (x fastest) used for per-slice processing.
template <typename T>
struct Image2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> pixels;

  Image2D() = default;
  Image2D(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), pixels(w * h, fill) {}

  T& at(std::size_t x, std::size_t y) { return pixels[x + width * y]; }
  const T& at(std::size_t x, std::size_t y) const { return pixels[x + width * y]; }
  friend bool operator==(const Image2D&, const Image2D&) = default;
};

/// In-slice (width, height) and slice count for a view.
struct SliceGeometry {
  std::size_t width;
  std::size_t height;
  std::size_t count;
};

SliceGeometry slice_geometry(const Dims& dims, ViewAxis axis);

/// Volume index of in-slice pixel (u, v) on slice `s`. Sagittal slices are
/// (y, z) planes, coronal (x, z), axial (x, y).
inline std::size_t slice_voxel_index(const Dims& d, ViewAxis axis, std::size_t s, std::size_t u,
                                     std::size_t v) {
  switch (axis) {
    case ViewAxis::sagittal:
      return s + d.nx * (u + d.ny * v);
    case ViewAxis::coronal:
      return u + d.nx * (s + d.ny * v);
    case ViewAxis::axial:
    default:
      return u + d.nx * (v + d.ny * s);
  }
}

template <typename T>
Image2D<T> extract_slice(const Volume<T>& vol, ViewAxis axis, std::size_t s) {
  const auto g = slice_geometry(vol.dims(), axis);
  if (s >= g.count) {
    throw InputError("slice index out of range");
  }
  Image2D<T> img(g.width, g.height);
  for (std::size_t v = 0; v < g.height; ++v) {
    for (std::size_t u = 0; u < g.width; ++u) {
      img.at(u, v) = vol[slice_voxel_index(vol.dims(), axis, s, u, v)];
    }
  }
  return img;
}

template <typename T>
void insert_slice(Volume<T>& vol, ViewAxis axis, std::size_t s, const Image2D<T>& img) {
  const auto g = slice_geometry(vol.dims(), axis);
  if (s >= g.count || img.width != g.width || img.height != g.height) {
    throw InputError("slice does not fit volume");
  }
  for (std::size_t v = 0; v < g.height; ++v) {
    for (std::size_t u = 0; u < g.width; ++u) {
      vol[slice_voxel_index(vol.dims(), axis, s, u, v)] = img.at(u, v);
    }
  }
}

std::size_t count_true(const BinaryVolume& mask);

/// Voxelwise a ∪ b, a ∩ b, a − b.
BinaryVolume mask_or(const BinaryVolume& a, const BinaryVolume& b);
BinaryVolume mask_and(const BinaryVolume& a, const BinaryVolume& b);
BinaryVolume mask_minus(const BinaryVolume& a, const BinaryVolume& b);
bool is_subset(const BinaryVolume& inner, const BinaryVolume& outer);

}  // namespace fissure
