#include "fissure/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "fissure/components.hpp"
#include "fissure/parallel.hpp"
#include "fissure/topology.hpp"

namespace fissure {

void PostprocessParams::validate() const {
  if (!(shape_ratio > 0.0 && shape_ratio <= 1.0)) throw InputError("T_s must lie in (0, 1]");
  if (skel_min_component < 1 || repair_big_threshold < 1 || final_min_component < 1) {
    throw InputError("component size thresholds must be >= 1");
  }
}

ShapeStats ellipse_axes(const std::vector<Pixel>& pixels) {
  ShapeStats s;
  s.pixel_count = pixels.size();
  if (pixels.empty()) return s;
  const double n = static_cast<double>(pixels.size());
  double mu = 0.0, mv = 0.0;
  for (const auto& p : pixels) {
    mu += p.u;
    mv += p.v;
  }
  mu /= n;
  mv /= n;
  double cuu = 0.0, cvv = 0.0, cuv = 0.0;
  for (const auto& p : pixels) {
    cuu += (p.u - mu) * (p.u - mu);
    cvv += (p.v - mv) * (p.v - mv);
    cuv += (p.u - mu) * (p.v - mv);
  }
  // Unit-square pixels contribute 1/12 of intrinsic variance per axis.
  cuu = cuu / n + 1.0 / 12.0;
  cvv = cvv / n + 1.0 / 12.0;
  cuv /= n;
  const double common = std::sqrt((cuu - cvv) * (cuu - cvv) + 4.0 * cuv * cuv);
  const double l1 = (cuu + cvv + common) / 2.0;
  const double l2 = std::max((cuu + cvv - common) / 2.0, 0.0);
  s.major = 4.0 * std::sqrt(l1);
  s.minor = 4.0 * std::sqrt(l2);
  return s;
}

SliceShapeResult shape_measure_slice(const Image2D<std::uint8_t>& slice, double shape_ratio) {
  SliceShapeResult out;
  out.kept = Image2D<std::uint8_t>(slice.width, slice.height);
  const auto table = label_components(slice, Connectivity2D::c8);
  std::vector<std::vector<Pixel>> members(table.count());
  for (std::size_t v = 0; v < slice.height; ++v) {
    for (std::size_t u = 0; u < slice.width; ++u) {
      const auto l = table.labels[u + slice.width * v];
      if (l != 0) {
        members[static_cast<std::size_t>(l - 1)].push_back(
            {static_cast<double>(u), static_cast<double>(v)});
      }
    }
  }
  std::vector<std::uint8_t> keep(table.count() + 1, 0);
  for (std::size_t c = 0; c < members.size(); ++c) {
    out.components.push_back(ellipse_axes(members[c]));
    if (out.components.back().ratio() >= shape_ratio) {
      out.removed.push_back(static_cast<std::int32_t>(c + 1));
    } else {
      keep[c + 1] = 1;
    }
  }
  for (std::size_t i = 0; i < slice.pixels.size(); ++i) {
    out.kept.pixels[i] = keep[static_cast<std::size_t>(table.labels[i])];
  }
  return out;
}

BinaryVolume shape_measure_filter(const BinaryVolume& patch, const PostprocessParams& p) {
  p.validate();
  BinaryVolume out(patch.dims(), patch.spacing());
  const auto geom = slice_geometry(patch.dims(), ViewAxis::sagittal);
  parallel_for(geom.count, [&](std::size_t s) {
    const auto slice = extract_slice(patch, ViewAxis::sagittal, s);
    insert_slice(out, ViewAxis::sagittal, s, shape_measure_slice(slice, p.shape_ratio).kept);
  });
  return out;
}

SkeletonVolume skeletonize_3d(const BinaryVolume& q) { return {thin_3d(q), {}}; }

std::vector<std::size_t> find_branch_points(const BinaryVolume& skeleton) {
  std::vector<std::size_t> flagged;
  const Dims d = skeleton.dims();
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = skeleton.index(x, y, z);
        if (!skeleton[i]) continue;
        const Neighbourhood n = neighbourhood(skeleton, x, y, z);
        int count = 0;
        for (auto b : n) count += b;
        if (count >= 4) flagged.push_back(i);
      }
    }
  }
  return flagged;
}

SkeletonVolume remove_branch_points(const SkeletonVolume& sk) {
  SkeletonVolume out = sk;
  const auto flagged = find_branch_points(sk.skeleton);
  for (std::size_t i : flagged) out.skeleton[i] = 0;
  out.removed_branch_points.insert(out.removed_branch_points.end(), flagged.begin(),
                                   flagged.end());
  std::sort(out.removed_branch_points.begin(), out.removed_branch_points.end());
  return out;
}

BinaryVolume select_candidates(const SkeletonVolume& sk, const PostprocessParams& p) {
  p.validate();
  return filter_components_by_size(sk.skeleton, Connectivity3D::c26, p.skel_min_component);
}

namespace {

template <typename Fn>
void for_each_neighbour26(const Dims& d, std::size_t i, Fn&& fn) {
  const auto x = static_cast<std::ptrdiff_t>(i % d.nx);
  const auto y = static_cast<std::ptrdiff_t>((i / d.nx) % d.ny);
  const auto z = static_cast<std::ptrdiff_t>(i / (d.nx * d.ny));
  for (std::ptrdiff_t dz = -1; dz <= 1; ++dz) {
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const auto nx = x + dx, ny = y + dy, nz = z + dz;
        if (nx < 0 || ny < 0 || nz < 0 || nx >= static_cast<std::ptrdiff_t>(d.nx) ||
            ny >= static_cast<std::ptrdiff_t>(d.ny) || nz >= static_cast<std::ptrdiff_t>(d.nz)) {
          continue;
        }
        fn(static_cast<std::size_t>(nx) +
           d.nx * (static_cast<std::size_t>(ny) + d.ny * static_cast<std::size_t>(nz)));
      }
    }
  }
}

}  // namespace

BinaryVolume fill_holes(const BinaryVolume& candidate, const SkeletonVolume& sk) {
  require_same_grid(candidate, sk.skeleton, "fill_holes");
  BinaryVolume out = candidate;
  std::vector<std::size_t> pending = sk.removed_branch_points;
  // Rounds add every point touching the current set at once, so the result
  // does not depend on the order of the branch-point list.
  while (true) {
    std::vector<std::size_t> add;
    std::vector<std::size_t> rest;
    for (std::size_t i : pending) {
      if (out[i]) continue;
      bool touches = false;
      for_each_neighbour26(out.dims(), i, [&](std::size_t j) { touches = touches || out[j]; });
      (touches ? add : rest).push_back(i);
    }
    if (add.empty()) break;
    for (std::size_t i : add) out[i] = 1;
    pending = std::move(rest);
  }
  return out;
}

BinaryVolume restore_thickness(const BinaryVolume& q, const BinaryVolume& fissure_skel,
                               const BinaryVolume& clutter_skel) {
  require_same_grid(q, fissure_skel, "restore_thickness");
  require_same_grid(q, clutter_skel, "restore_thickness");
  enum : std::uint8_t { kUnset = 0, kFissure = 1, kClutter = 2 };
  std::vector<std::uint8_t> label(q.size(), kUnset);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if ((fissure_skel[i] || clutter_skel[i]) && !q[i]) {
      throw InputError("restore_thickness: skeleton seed outside the object");
    }
    if (fissure_skel[i]) {
      label[i] = kFissure;
      frontier.push_back(i);
    } else if (clutter_skel[i]) {
      label[i] = kClutter;
      frontier.push_back(i);
    }
  }
  // Layer-synchronous expansion: a voxel first reached in the same layer by
  // both classes is claimed by F.
  std::vector<std::uint32_t> layer(q.size(), 0);
  std::uint32_t depth = 0;
  std::vector<std::size_t> next;
  while (!frontier.empty()) {
    ++depth;
    next.clear();
    for (std::size_t i : frontier) {
      for_each_neighbour26(q.dims(), i, [&](std::size_t j) {
        if (!q[j]) return;
        if (label[j] == kUnset) {
          label[j] = label[i];
          layer[j] = depth;
          next.push_back(j);
        } else if (label[j] == kClutter && label[i] == kFissure && layer[j] == depth) {
          label[j] = kFissure;
        }
      });
    }
    frontier.swap(next);
  }
  BinaryVolume out(q.dims(), q.spacing());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = label[i] == kFissure ? 1 : 0;
  return out;
}

BinaryVolume repair_fissures(const BinaryVolume& q, const BinaryVolume& q_s,
                             const PostprocessParams& p) {
  p.validate();
  require_same_grid(q, q_s, "repair_fissures");
  const BinaryVolume rest = mask_minus(q, q_s);
  const auto table = label_components(rest, Connectivity3D::c26);
  BinaryVolume merged = q_s;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const auto l = table.labels[i];
    if (l != 0 && table.stats[static_cast<std::size_t>(l)].voxel_count < p.repair_big_threshold) {
      merged[i] = 1;
    }
  }
  return filter_components_by_size(merged, Connectivity3D::c26, p.final_min_component);
}

PostprocessResult postprocess(const BinaryVolume& patch, const PostprocessParams& p) {
  p.validate();
  PostprocessResult r;
  r.shape_filtered = shape_measure_filter(patch, p);
  const SkeletonVolume sk = skeletonize_3d(r.shape_filtered);
  r.skeleton = sk.skeleton;
  const SkeletonVolume pruned = remove_branch_points(sk);
  r.pruned = pruned.skeleton;
  const BinaryVolume candidates = select_candidates(pruned, p);
  r.fissure_skeleton = fill_holes(candidates, pruned);
  const BinaryVolume clutter = mask_minus(r.skeleton, r.fissure_skeleton);
  r.fissure = restore_thickness(r.shape_filtered, r.fissure_skeleton, clutter);
  r.final_mask = repair_fissures(r.shape_filtered, r.fissure, p);
  return r;
}

}  // namespace fissure
