#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fissure/components.hpp"
#include "fissure/parallel.hpp"
#include "fissure/phantom.hpp"
#include "fissure/topology.hpp"

using namespace fissure;

TEST_SUITE("phantom") {
  TEST_CASE("no structures and no noise gives a constant volume") {
    PhantomSpec s;
    s.dims = {8, 7, 6};
    const auto ph = generate(s);
    for (std::size_t i = 0; i < ph.volume.size(); ++i) CHECK(ph.volume[i] == s.background);
    CHECK(count_true(ph.all_truth()) == 0);
    CHECK(count_true(ph.lung_mask) == ph.volume.size());
    CHECK(ph.clipped_structures == 0);
  }

  TEST_CASE("a plane perpendicular to x rasterizes ny * nz voxels") {
    PhantomSpec s;
    s.dims = {20, 13, 11};
    s.planes.push_back({{7, 0, 0}, {1, 0, 0}, 1.0, 100.0f});
    const auto ph = generate(s);
    CHECK(count_true(ph.plane_truth) == 13 * 11);
    for (std::size_t z = 0; z < 11; ++z)
      for (std::size_t y = 0; y < 13; ++y) {
        CHECK(ph.plane_truth(7, y, z) == 1);
        CHECK(ph.volume(7, y, z) == 100.0f);
      }
  }

  TEST_CASE("invalid structures are rejected and clipped ones counted") {
    PhantomSpec s;
    s.planes.push_back({{0, 0, 0}, {1, 0, 0}, 0.5, 0.0f});
    CHECK_THROWS_AS(generate(s), InputError);
    s.planes.clear();
    s.tubes.push_back({{{0, 0, 0}, {5, 5, 5}}, 0.5, 0.0f});
    CHECK_THROWS_AS(generate(s), InputError);
    s.tubes = {{{{0, 0, 0}, {40, 5, 5}}, 2.0, 0.0f}};
    CHECK(generate(s).clipped_structures == 1);
    CHECK_THROWS_AS(canonical_phantom("NOPE"), InputError);
  }

  TEST_CASE("fixed seed is bitwise reproducible across runs and thread counts") {
    auto s = canonical_phantom("OBLIQUE_PLANE");
    s.noise_sigma = 40.0;
    s.seed = 7;
    set_thread_count(1);
    const auto a = generate(s);
    set_thread_count(5);
    const auto b = generate(s);
    set_thread_count(0);
    CHECK(std::memcmp(a.volume.data().data(), b.volume.data().data(), a.volume.size() * sizeof(float)) == 0);
    CHECK(a.plane_truth == b.plane_truth);
    s.seed = 8;
    CHECK_FALSE(generate(s).volume == a.volume);
    CHECK(counter_normal(3, 11) == counter_normal(3, 11));
  }

  TEST_CASE("noise has the requested spread and does not leak into truth") {
    PhantomSpec s;
    s.dims = {40, 40, 40};
    s.noise_sigma = 40.0;
    const auto ph = generate(s);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < ph.volume.size(); ++i) {
      const double d = ph.volume[i] - s.background;
      sum += d;
      sq += d * d;
    }
    const double n = static_cast<double>(ph.volume.size());
    CHECK(std::abs(sum / n) < 2.0);
    CHECK(std::sqrt(sq / n) == doctest::Approx(40.0).epsilon(0.03));
    CHECK(count_true(ph.all_truth()) == 0);
  }

  TEST_CASE("canonical solids have the expected topology") {
    CHECK(canonical_suite().size() == 7);
    for (const char* name : {"SOLID_CUBE", "STRAIGHT_TUBE", "Y_TUBE"}) {
      const auto ph = generate(canonical_phantom(name));
      CHECK(euler_characteristic(ph.all_truth()) == 1);
      CHECK(ph.clipped_structures == 0);
    }
    CHECK(euler_characteristic(generate(canonical_phantom("TORUS")).solid_truth) == 0);
    CHECK(euler_characteristic(generate(canonical_phantom("HOLLOW_BOX")).solid_truth) == 2);
  }

  TEST_CASE("composite plane and tube truths overlap only at crossings") {
    const auto spec = canonical_phantom("COMPOSITE");
    const auto ph = generate(spec);
    CHECK(ph.clipped_structures == 0);
    const auto& pl = spec.planes[0];
    const double norm = std::sqrt(pl.normal[0] * pl.normal[0] + pl.normal[1] * pl.normal[1] + pl.normal[2] * pl.normal[2]);
    auto tube_dist = [](const TubeSpec& t, double x, double y, double z) {
      const auto& a = t.polyline[0];
      const auto& b = t.polyline[1];
      const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
      double k = ((x - a[0]) * ux + (y - a[1]) * uy + (z - a[2]) * uz) / (ux * ux + uy * uy + uz * uz);
      k = std::fmin(1.0, std::fmax(0.0, k));
      const double dx = x - a[0] - k * ux, dy = y - a[1] - k * uy, dz = z - a[2] - k * uz;
      return std::sqrt(dx * dx + dy * dy + dz * dz);
    };
    std::size_t plane = 0, tube = 0, both = 0;
    for (std::size_t z = 0; z < 128; ++z)
      for (std::size_t y = 0; y < 128; ++y)
        for (std::size_t x = 0; x < 128; ++x) {
          const double fx = static_cast<double>(x), fy = static_cast<double>(y), fz = static_cast<double>(z);
          const bool p = std::abs((fx - pl.point[0]) * pl.normal[0] + (fy - pl.point[1]) * pl.normal[1] +
                                  (fz - pl.point[2]) * pl.normal[2]) / norm <= pl.thickness_vox / 2.0;
          bool t = false;
          for (const auto& tb : spec.tubes) t = t || tube_dist(tb, fx, fy, fz) <= tb.radius_vox;
          plane += p;
          tube += t;
          both += p && t;
        }
    CHECK(count_true(ph.plane_truth) == plane);
    CHECK(count_true(ph.tube_truth) == tube);
    CHECK(count_true(mask_and(ph.plane_truth, ph.tube_truth)) == both);
    CHECK(both > 0);
    CHECK(both < tube / 10);
    CHECK(count_components(ph.plane_truth, Connectivity3D::c26) == 1);
  }
}
