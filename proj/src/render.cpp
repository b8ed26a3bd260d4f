#include "fissure/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace fissure {

RgbImage render_slice(const ScalarVolume& volume, const BinaryVolume* mask,
                      const BinaryVolume* truth, ViewAxis axis, std::size_t slice) {
  if (mask) require_same_grid(volume, *mask, "render mask");
  if (truth) require_same_grid(volume, *truth, "render truth");
  const auto g = slice_geometry(volume.dims(), axis);
  if (slice >= g.count) {
    throw InputError("slice " + std::to_string(slice) + " out of range for " + to_string(axis) +
                     " view (" + std::to_string(g.count) + " slices)");
  }
  const Image2D<float> grey = extract_slice(volume, axis, slice);
  const auto [lo, hi] = std::minmax_element(grey.pixels.begin(), grey.pixels.end());
  const float range = *hi - *lo;

  RgbImage img{g.width, g.height, std::vector<Rgb>(g.width * g.height)};
  for (std::size_t v = 0; v < g.height; ++v) {
    // Put the largest v (superior / posterior) at the top of the picture.
    const std::size_t row = g.height - 1 - v;
    for (std::size_t u = 0; u < g.width; ++u) {
      const std::size_t i = slice_voxel_index(volume.dims(), axis, slice, u, v);
      const bool m = mask && (*mask)[i];
      const bool t = truth && (*truth)[i];
      Rgb px;
      if (m && t) {
        px = kOverlapColour;
      } else if (m) {
        px = kMaskColour;
      } else if (t) {
        px = kTruthColour;
      } else {
        const float s = range > 0.0f ? (grey.at(u, v) - *lo) / range : 0.0f;
        const auto level = static_cast<std::uint8_t>(std::lround(std::clamp(s, 0.0f, 1.0f) * 255.0f));
        px = {level, level, level};
      }
      img.pixels[u + g.width * row] = px;
    }
  }
  return img;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw std::runtime_error("cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < img.height; ++y) {
    auto* row = const_cast<png_bytep>(reinterpret_cast<const png_byte*>(img.pixels.data() + y * img.width));
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace fissure
