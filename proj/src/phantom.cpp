#include "fissure/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fissure/parallel.hpp"

namespace fissure {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = sub(b, a);
  const Vec3 ap = sub(p, a);
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(ap, ab) / len2, 0.0, 1.0) : 0.0;
  const Vec3 closest{a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
  const Vec3 d = sub(p, closest);
  return std::sqrt(dot(d, d));
}

bool in_plane(const PlaneSpec& s, const Vec3& p) {
  const double norm = std::sqrt(dot(s.normal, s.normal));
  return std::abs(dot(sub(p, s.point), s.normal)) / norm <= s.thickness_vox / 2.0;
}

bool in_tube(const TubeSpec& s, const Vec3& p) {
  if (s.polyline.size() == 1) return segment_distance(p, s.polyline[0], s.polyline[0]) <= s.radius_vox;
  for (std::size_t k = 0; k + 1 < s.polyline.size(); ++k) {
    if (segment_distance(p, s.polyline[k], s.polyline[k + 1]) <= s.radius_vox) return true;
  }
  return false;
}

bool in_box(const BoxSpec& s, const Vec3& p) {
  for (int a = 0; a < 3; ++a) {
    if (p[a] < s.lo[a] || p[a] > s.hi[a]) return false;
  }
  if (s.wall_vox <= 0.0) return true;
  for (int a = 0; a < 3; ++a) {
    if (p[a] < s.lo[a] + s.wall_vox || p[a] > s.hi[a] - s.wall_vox) return true;
  }
  return false;
}

bool in_torus(const TorusSpec& s, const Vec3& p) {
  const Vec3 d = sub(p, s.center);
  const double ring = std::sqrt(d[0] * d[0] + d[1] * d[1]) - s.major_radius;
  return ring * ring + d[2] * d[2] <= s.minor_radius * s.minor_radius;
}

bool inside_grid(const Dims& d, const Vec3& lo, const Vec3& hi) {
  return lo[0] >= 0 && lo[1] >= 0 && lo[2] >= 0 && hi[0] <= static_cast<double>(d.nx - 1) &&
         hi[1] <= static_cast<double>(d.ny - 1) && hi[2] <= static_cast<double>(d.nz - 1);
}

std::size_t count_clipped(const PhantomSpec& spec) {
  std::size_t clipped = 0;
  for (const auto& t : spec.tubes) {
    for (const auto& p : t.polyline) {
      const Vec3 lo{p[0] - t.radius_vox, p[1] - t.radius_vox, p[2] - t.radius_vox};
      const Vec3 hi{p[0] + t.radius_vox, p[1] + t.radius_vox, p[2] + t.radius_vox};
      if (!inside_grid(spec.dims, lo, hi)) {
        ++clipped;
        break;
      }
    }
  }
  for (const auto& b : spec.boxes) clipped += !inside_grid(spec.dims, b.lo, b.hi);
  for (const auto& t : spec.tori) {
    const double r = t.major_radius + t.minor_radius;
    clipped += !inside_grid(spec.dims, {t.center[0] - r, t.center[1] - r, t.center[2] - t.minor_radius},
                            {t.center[0] + r, t.center[1] + r, t.center[2] + t.minor_radius});
  }
  return clipped;
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(counter));
  const std::uint64_t b = splitmix64(a);
  // 53-bit uniforms in (0, 1].
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

BinaryVolume Phantom::all_truth() const {
  return mask_or(mask_or(plane_truth, tube_truth), solid_truth);
}

Phantom generate(const PhantomSpec& spec) {
  for (const auto& p : spec.planes) {
    if (p.thickness_vox < 1.0) throw InputError("plane thickness must be >= 1 voxel");
    if (dot(p.normal, p.normal) == 0.0) throw InputError("plane normal must be nonzero");
  }
  for (const auto& t : spec.tubes) {
    if (t.radius_vox < 1.0) throw InputError("tube radius must be >= 1 voxel");
    if (t.polyline.empty()) throw InputError("tube polyline is empty");
  }
  if (!(spec.noise_sigma >= 0.0)) throw InputError("noise sigma must be >= 0");

  Phantom ph{ScalarVolume(spec.dims, spec.spacing, spec.background),
             BinaryVolume(spec.dims, spec.spacing), BinaryVolume(spec.dims, spec.spacing),
             BinaryVolume(spec.dims, spec.spacing), BinaryVolume(spec.dims, spec.spacing, 1),
             count_clipped(spec)};
  const Dims d = spec.dims;
  parallel_for(d.nz, [&](std::size_t z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const Vec3 p{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        const std::size_t i = ph.volume.index(x, y, z);
        float value = spec.background;
        for (const auto& s : spec.planes) {
          if (in_plane(s, p)) {
            value = s.intensity;
            ph.plane_truth[i] = 1;
          }
        }
        for (const auto& s : spec.tubes) {
          if (in_tube(s, p)) {
            value = s.intensity;
            ph.tube_truth[i] = 1;
          }
        }
        for (const auto& s : spec.boxes) {
          if (in_box(s, p)) {
            value = s.intensity;
            ph.solid_truth[i] = 1;
          }
        }
        for (const auto& s : spec.tori) {
          if (in_torus(s, p)) {
            value = s.intensity;
            ph.solid_truth[i] = 1;
          }
        }
        if (spec.noise_sigma > 0.0) {
          value += static_cast<float>(spec.noise_sigma * counter_normal(spec.seed, i));
        }
        ph.volume[i] = value;
      }
    }
  });
  return ph;
}

std::vector<PhantomSpec> canonical_suite() {
  const float fg = -850.0f + kPhantomContrast;
  std::vector<PhantomSpec> suite;

  PhantomSpec cube;
  cube.name = "SOLID_CUBE";
  cube.dims = {24, 24, 24};
  cube.boxes.push_back({{8, 8, 8}, {16, 16, 16}, 0.0, fg});
  suite.push_back(cube);

  PhantomSpec hollow;
  hollow.name = "HOLLOW_BOX";
  hollow.dims = {24, 24, 24};
  hollow.boxes.push_back({{6, 6, 6}, {16, 16, 16}, 1.0, fg});
  suite.push_back(hollow);

  PhantomSpec torus;
  torus.name = "TORUS";
  torus.dims = {32, 32, 16};
  torus.tori.push_back({{15.5, 15.5, 7.5}, 9.0, 3.0, fg});
  suite.push_back(torus);

  PhantomSpec straight;
  straight.name = "STRAIGHT_TUBE";
  straight.dims = {24, 24, 40};
  straight.tubes.push_back({{{12, 12, 6}, {12, 12, 33}}, 3.0, fg});
  suite.push_back(straight);

  // Stem along -z, arms along +x and -x: a planar three-way junction at (20, 16, 20).
  PhantomSpec y_tube;
  y_tube.name = "Y_TUBE";
  y_tube.dims = {40, 32, 36};
  y_tube.tubes.push_back({{{20, 16, 20}, {20, 16, 5}}, 2.0, fg});
  y_tube.tubes.push_back({{{20, 16, 20}, {34, 16, 20}}, 2.0, fg});
  y_tube.tubes.push_back({{{20, 16, 20}, {6, 16, 20}}, 2.0, fg});
  y_tube.junctions.push_back({20, 16, 20});
  suite.push_back(y_tube);

  PhantomSpec oblique;
  oblique.name = "OBLIQUE_PLANE";
  oblique.dims = {64, 64, 64};
  oblique.planes.push_back({{31.5, 31.5, 31.5}, {0.35, 0.55, 0.76}, 2.0, fg});
  suite.push_back(oblique);

  PhantomSpec composite;
  composite.name = "COMPOSITE";
  composite.dims = {128, 128, 128};
  composite.planes.push_back({{63.5, 63.5, 63.5}, {0.35, 0.55, 0.76}, 2.0, fg});
  composite.tubes.push_back({{{4, 40, 70}, {123, 52, 58}}, 3.0, fg});
  composite.tubes.push_back({{{4, 88, 40}, {123, 76, 90}}, 3.0, fg});
  composite.noise_sigma = 0.1 * kPhantomContrast;
  composite.seed = 20240611;
  suite.push_back(composite);

  return suite;
}

PhantomSpec canonical_phantom(const std::string& name) {
  for (auto& s : canonical_suite()) {
    if (s.name == name) return s;
  }
  throw InputError("unknown phantom '" + name + "'");
}

}  // namespace fissure
