#include "fissure/preprocess.hpp"

#include <cmath>

#include "fissure/components.hpp"
#include "fissure/parallel.hpp"

namespace fissure {

bool OrientationBin::contains(double theta_deg) const {
  double d = std::fmod(theta_deg - start_deg, 180.0);
  if (d < 0.0) d += 180.0;
  return d < width_deg;
}

std::vector<OrientationBin> make_bins(int n) {
  if (n < 2) throw InputError("orientation bin count must be >= 2");
  const double step = 180.0 / n;
  std::vector<OrientationBin> bins;
  for (int i = 0; i < n; ++i) bins.push_back({i, i * step, 2.0 * step});
  return bins;
}

void PreprocessParams::validate() const {
  if (bins < 2) throw InputError("orientation bin count must be >= 2");
  if (min_3d_component < 1) throw InputError("min_3d_component must be >= 1");
  if (!(curvature_tolerance > 0.0 && curvature_tolerance <= 1.0)) {
    throw InputError("curvature tolerance must lie in (0, 1]");
  }
}

BinaryVolume partition(const OrientationField& field, ViewAxis view, const OrientationBin& bin) {
  const auto& v = field.view(view);
  BinaryVolume out(field.fused.dims(), field.fused.spacing());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = field.has_vector(view, i) && bin.contains(v.theta_deg[i]) ? 1 : 0;
  }
  return out;
}

BinaryVolume curvature_filter_2d(const BinaryVolume& binmask, const OrientationField& field,
                                 ViewAxis view, const OrientationBin& bin,
                                 const PreprocessParams& p) {
  p.validate();
  require_same_grid(binmask, field.fused, "curvature_filter_2d");
  const auto& theta = field.view(view).theta_deg;
  BinaryVolume out(binmask.dims(), binmask.spacing());
  const auto geom = slice_geometry(binmask.dims(), view);
  parallel_for(geom.count, [&](std::size_t s) {
    const auto slice = extract_slice(binmask, view, s);
    const auto table = label_components(slice, Connectivity2D::c8);
    if (table.count() == 0) return;
    std::vector<std::size_t> inside(table.sizes.size(), 0);
    for (std::size_t v = 0; v < geom.height; ++v) {
      for (std::size_t u = 0; u < geom.width; ++u) {
        const auto l = table.labels[u + geom.width * v];
        if (l == 0) continue;
        if (bin.contains(theta[slice_voxel_index(binmask.dims(), view, s, u, v)])) {
          ++inside[static_cast<std::size_t>(l)];
        }
      }
    }
    for (std::size_t v = 0; v < geom.height; ++v) {
      for (std::size_t u = 0; u < geom.width; ++u) {
        const auto l = static_cast<std::size_t>(table.labels[u + geom.width * v]);
        if (l == 0) continue;
        const double fraction =
            static_cast<double>(inside[l]) / static_cast<double>(table.sizes[l]);
        if (fraction >= p.curvature_tolerance) {
          out[slice_voxel_index(binmask.dims(), view, s, u, v)] = 1;
        }
      }
    }
  });
  return out;
}

BinaryVolume planar_filter_3d(const BinaryVolume& binmask, const PreprocessParams& p) {
  p.validate();
  return filter_components_by_size(binmask, Connectivity3D::c26, p.min_3d_component);
}

BinaryVolume integrate_bins(std::span<const BinaryVolume> masks) {
  if (masks.empty()) throw InputError("integrate_bins needs at least one mask");
  BinaryVolume out = masks.front();
  for (std::size_t k = 1; k < masks.size(); ++k) out = mask_or(out, masks[k]);
  return out;
}

BinaryVolume integrate_views(const BinaryVolume& sagittal, const BinaryVolume& axial,
                             const BinaryVolume& coronal) {
  return mask_or(mask_or(sagittal, axial), coronal);
}

PreprocessResult preprocess(const OrientationField& field, const PreprocessParams& p,
                            bool keep_bin_masks) {
  p.validate();
  const auto bins = make_bins(p.bins);
  PreprocessResult result;
  for (ViewAxis view : kAllViews) {
    std::vector<BinaryVolume> chain;
    chain.reserve(bins.size());
    for (const auto& bin : bins) {
      const BinaryVolume members = partition(field, view, bin);
      const BinaryVolume curved = curvature_filter_2d(members, field, view, bin, p);
      chain.push_back(planar_filter_3d(curved, p));
    }
    result.per_view[view_slot(view)] = integrate_bins(chain);
    if (keep_bin_masks) result.per_bin[view_slot(view)] = std::move(chain);
  }
  result.patch = integrate_views(result.per_view[view_slot(ViewAxis::sagittal)],
                                 result.per_view[view_slot(ViewAxis::axial)],
                                 result.per_view[view_slot(ViewAxis::coronal)]);
  return result;
}

}  // namespace fissure
