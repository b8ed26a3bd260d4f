#include "fissure/odos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fissure/parallel.hpp"

namespace fissure {

void FilterParams::validate() const {
  if (stick_length < 3 || stick_length % 2 == 0) {
    throw InputError("stick length must be odd and >= 3");
  }
  if (stick_spacing < 1) throw InputError("stick spacing must be >= 1");
  if (!(kappa >= 0.0f) || !std::isfinite(kappa)) throw InputError("kappa must be >= 0");
  if (!(threshold >= 0.0f) || !std::isfinite(threshold)) {
    throw InputError("vector threshold must be >= 0");
  }
}

std::vector<Offset2> digital_line(double theta_deg, int length) {
  const double rad = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const int half = length / 2;
  std::vector<Offset2> line;
  line.reserve(static_cast<std::size_t>(length));
  for (int t = -half; t <= half; ++t) {
    if (std::abs(c) >= std::abs(s)) {
      line.push_back({t, static_cast<int>(std::lround(t * s / c))});
    } else {
      line.push_back({static_cast<int>(std::lround(t * c / s)), t});
    }
  }
  return line;
}

std::vector<StickKernel> build_kernels(const FilterParams& p) {
  p.validate();
  const int n = p.orientation_count();
  std::vector<StickKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    StickKernel k;
    k.index = i;
    k.theta_deg = i * p.orientation_step_deg();
    k.middle = digital_line(k.theta_deg, p.stick_length);
    const double rad = k.theta_deg * std::numbers::pi / 180.0;
    const Offset2 perp{static_cast<int>(std::lround(-std::sin(rad) * p.stick_spacing)),
                       static_cast<int>(std::lround(std::cos(rad) * p.stick_spacing))};
    for (const auto& o : k.middle) {
      k.left.push_back({o.du - perp.du, o.dv - perp.dv});
      k.right.push_back({o.du + perp.du, o.dv + perp.dv});
    }
    kernels.push_back(std::move(k));
  }
  return kernels;
}

namespace {

int kernel_radius(const std::vector<StickKernel>& kernels) {
  int r = 0;
  for (const auto& k : kernels) {
    for (const auto* stick : {&k.left, &k.middle, &k.right}) {
      for (const auto& o : *stick) r = std::max({r, std::abs(o.du), std::abs(o.dv)});
    }
  }
  return r;
}

/// Slice copy with replicated borders so every stick sample is addressable.
struct PaddedSlice {
  std::vector<float> pixels;
  std::ptrdiff_t stride = 0;
  int radius = 0;

  PaddedSlice(const Image2D<float>& img, int r) : radius(r) {
    const auto w = static_cast<std::ptrdiff_t>(img.width);
    const auto h = static_cast<std::ptrdiff_t>(img.height);
    stride = w + 2 * r;
    pixels.resize(static_cast<std::size_t>(stride * (h + 2 * r)));
    for (std::ptrdiff_t v = -r; v < h + r; ++v) {
      const auto sv = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, h - 1));
      float* row = pixels.data() + (v + r) * stride;
      for (std::ptrdiff_t u = -r; u < w + r; ++u) {
        const auto su = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(u, 0, w - 1));
        row[u + r] = img.at(su, sv);
      }
    }
  }

  [[nodiscard]] const float* row(std::size_t v) const {
    return pixels.data() + (static_cast<std::ptrdiff_t>(v) + radius) * stride + radius;
  }
};

struct LinearKernel {
  std::vector<std::ptrdiff_t> left, middle, right;
};

LinearKernel linearize(const StickKernel& k, std::ptrdiff_t stride) {
  LinearKernel lk;
  auto lin = [stride](const std::vector<Offset2>& stick, std::vector<std::ptrdiff_t>& out) {
    out.reserve(stick.size());
    for (const auto& o : stick) out.push_back(o.dv * stride + o.du);
  };
  lin(k.left, lk.left);
  lin(k.middle, lk.middle);
  lin(k.right, lk.right);
  return lk;
}

void require_nonempty(const Image2D<float>& slice) {
  if (slice.width == 0 || slice.height == 0 || slice.pixels.size() != slice.width * slice.height) {
    throw InputError("slice must be at least 1x1");
  }
}

}  // namespace

StickDifferentials stick_differentials(const Image2D<float>& slice, const StickKernel& k,
                                       const FilterParams& p, const simd::KernelTable& kt) {
  p.validate();
  require_nonempty(slice);
  const PaddedSlice padded(slice, kernel_radius({k}));
  const LinearKernel lk = linearize(k, padded.stride);
  StickDifferentials out{Image2D<float>(slice.width, slice.height),
                         Image2D<float>(slice.width, slice.height),
                         Image2D<float>(slice.width, slice.height)};
  for (std::size_t v = 0; v < slice.height; ++v) {
    const std::size_t at = v * slice.width;
    kt.stick_differentials(padded.row(v), lk.left.data(), lk.middle.data(), lk.right.data(),
                           k.middle.size(), slice.width, out.perp_max.pixels.data() + at,
                           out.perp_min.pixels.data() + at, out.parallel.pixels.data() + at);
  }
  return out;
}

LineStrength line_strength(const Image2D<float>& slice, const FilterParams& p,
                           const simd::KernelTable& kt) {
  require_nonempty(slice);
  const auto kernels = build_kernels(p);
  const PaddedSlice padded(slice, kernel_radius(kernels));
  std::vector<LinearKernel> linear;
  linear.reserve(kernels.size());
  for (const auto& k : kernels) linear.push_back(linearize(k, padded.stride));

  const std::size_t w = slice.width;
  LineStrength out{Image2D<float>(w, slice.height), Image2D<float>(w, slice.height),
                   Image2D<std::int32_t>(w, slice.height)};
  std::vector<float> perp_max(w), perp_min(w), par(w);
  const auto length = static_cast<std::size_t>(p.stick_length);
  constexpr float kLowest = -std::numeric_limits<float>::infinity();

  for (std::size_t v = 0; v < slice.height; ++v) {
    float* best_max = out.f_max.pixels.data() + v * w;
    float* best_min = out.f_min.pixels.data() + v * w;
    std::int32_t* best_idx = out.orientation.pixels.data() + v * w;
    std::fill(best_max, best_max + w, kLowest);
    std::fill(best_min, best_min + w, kLowest);
    for (std::size_t i = 0; i < linear.size(); ++i) {
      const auto& lk = linear[i];
      kt.stick_differentials(padded.row(v), lk.left.data(), lk.middle.data(), lk.right.data(),
                             length, w, perp_max.data(), perp_min.data(), par.data());
      kt.strength_update(perp_max.data(), perp_min.data(), par.data(), p.kappa,
                         static_cast<std::int32_t>(i), w, best_max, best_min, best_idx);
    }
    for (std::size_t u = 0; u < w; ++u) {
      best_max[u] = std::max(best_max[u], 0.0f);
      best_min[u] = std::max(best_min[u], 0.0f);
    }
  }
  return out;
}

SliceResponse cascade(const Image2D<float>& slice, const FilterParams& p,
                      const simd::KernelTable& kt) {
  LineStrength first = line_strength(slice, p, kt);
  LineStrength second = line_strength(first.f_max, p, kt);
  return {std::move(second.f_min), std::move(first.orientation)};
}

ViewResponse run_view(const ScalarVolume& v, ViewAxis axis, const FilterParams& p,
                      const simd::KernelTable& kt) {
  p.validate();
  ViewResponse out{ScalarVolume(v.dims(), v.spacing()), ScalarVolume(v.dims(), v.spacing())};
  const auto geom = slice_geometry(v.dims(), axis);
  const double step = p.orientation_step_deg();
  parallel_for(geom.count, [&](std::size_t s) {
    const auto slice = extract_slice(v, axis, s);
    const SliceResponse r = cascade(slice, p, kt);
    insert_slice(out.response, axis, s, r.response);
    Image2D<float> theta(slice.width, slice.height);
    for (std::size_t i = 0; i < theta.pixels.size(); ++i) {
      theta.pixels[i] = static_cast<float>(r.orientation.pixels[i] * step);
    }
    insert_slice(out.theta_deg, axis, s, theta);
  });
  return out;
}

ScalarVolume fuse_3d(const ScalarVolume& sagittal, const ScalarVolume& axial,
                     const ScalarVolume& coronal, const simd::KernelTable& kt) {
  require_same_grid(sagittal, axial, "fuse_3d");
  require_same_grid(sagittal, coronal, "fuse_3d");
  ScalarVolume out(sagittal.dims(), sagittal.spacing());
  const std::size_t plane = sagittal.dims().nx * sagittal.dims().ny;
  parallel_for(sagittal.dims().nz, [&](std::size_t z) {
    const std::size_t at = z * plane;
    kt.fuse3(axial.data().data() + at, sagittal.data().data() + at, coronal.data().data() + at,
             plane, out.data().data() + at);
  });
  return out;
}

std::size_t view_slot(ViewAxis a) {
  switch (a) {
    case ViewAxis::sagittal:
      return 0;
    case ViewAxis::axial:
      return 1;
    case ViewAxis::coronal:
      return 2;
  }
  return 0;
}

const OrientationField::View& OrientationField::view(ViewAxis a) const {
  return views[view_slot(a)];
}
OrientationField::View& OrientationField::view(ViewAxis a) { return views[view_slot(a)]; }

OrientationField vector_field(ScalarVolume fused, std::array<ViewResponse, 3> per_view,
                              const FilterParams& p) {
  OrientationField field;
  for (std::size_t slot = 0; slot < 3; ++slot) {
    require_same_grid(fused, per_view[slot].theta_deg, "vector_field");
    auto& view = field.views[slot];
    view.response = std::move(per_view[slot].response);
    view.theta_deg = std::move(per_view[slot].theta_deg);
    view.vec_u = ScalarVolume(fused.dims(), fused.spacing());
    view.vec_v = ScalarVolume(fused.dims(), fused.spacing());
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (fused[i] > p.threshold) {
        const double rad = view.theta_deg[i] * std::numbers::pi / 180.0;
        view.vec_u[i] = static_cast<float>(std::cos(rad));
        view.vec_v[i] = static_cast<float>(std::sin(rad));
      }
    }
  }
  field.fused = std::move(fused);
  return field;
}

OrientationField odos_filter(const ScalarVolume& v, const FilterParams& p,
                             const simd::KernelTable& kt) {
  std::array<ViewResponse, 3> per_view;
  for (ViewAxis axis : kAllViews) per_view[view_slot(axis)] = run_view(v, axis, p, kt);
  ScalarVolume fused =
      fuse_3d(per_view[view_slot(ViewAxis::sagittal)].response,
              per_view[view_slot(ViewAxis::axial)].response,
              per_view[view_slot(ViewAxis::coronal)].response, kt);
  return vector_field(std::move(fused), std::move(per_view), p);
}

}  // namespace fissure
