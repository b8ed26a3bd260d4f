#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fissure/odos.hpp"
#include "fissure/parallel.hpp"
#include "oracles.hpp"

using namespace fissure;

namespace {

Image2D<float> line_image(std::size_t w, std::size_t h, std::size_t row) {
  Image2D<float> img(w, h, 0.0f);
  for (std::size_t u = 0; u < w; ++u) img.at(u, row) = 1.0f;
  return img;
}

std::set<Offset2> as_set(const std::vector<Offset2>& v) { return {v.begin(), v.end()}; }

std::set<Offset2> swapped(const std::vector<Offset2>& v) {
  std::set<Offset2> s;
  for (const auto& o : v) s.insert({o.dv, o.du});
  return s;
}

}  // namespace

TEST_SUITE("odos") {
  TEST_CASE("parameter validation") {
    FilterParams p;
    CHECK_NOTHROW(p.validate());
    p.stick_length = 10;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.stick_length = 1;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.stick_spacing = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.kappa = -0.1f;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.threshold = -1.0f;
    CHECK_THROWS_AS(p.validate(), InputError);
  }

  TEST_CASE("L = 11 gives 20 kernels at 9 degree steps") {
    const auto ks = build_kernels(FilterParams{});
    REQUIRE(ks.size() == 20);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(ks[i].index == static_cast<int>(i));
      CHECK(ks[i].theta_deg == doctest::Approx(9.0 * i));
      CHECK(ks[i].middle.size() == 11);
      CHECK(ks[i].left.size() == 11);
      CHECK(ks[i].right.size() == 11);
      CHECK(as_set(ks[i].middle).count({0, 0}) == 1);
    }
  }

  TEST_CASE("theta = 0 kernel is axis aligned") {
    const auto k = build_kernels(FilterParams{}).front();
    std::set<Offset2> mid, left, right;
    for (int t = -5; t <= 5; ++t) {
      mid.insert({t, 0});
      left.insert({t, -2});
      right.insert({t, 2});
    }
    CHECK(as_set(k.middle) == mid);
    CHECK(as_set(k.left) == left);
    CHECK(as_set(k.right) == right);
  }

  TEST_CASE("theta = 90 kernel is theta = 0 with coordinates swapped") {
    const auto ks = build_kernels(FilterParams{});
    const auto& k0 = ks[0];
    const auto& k90 = ks[10];
    CHECK(k90.theta_deg == doctest::Approx(90.0));
    CHECK(as_set(k90.middle) == swapped(k0.middle));
    // The flanking pair as a whole is swapped; which side is "left" follows the
    // perpendicular's sign.
    std::set<Offset2> flanks90 = as_set(k90.left), flanks0 = swapped(k0.left);
    flanks90.merge(as_set(k90.right));
    flanks0.merge(swapped(k0.right));
    CHECK(flanks90 == flanks0);
  }

  TEST_CASE("kernels are axial: theta and theta + 180 sample the same pixels") {
    FilterParams p;
    for (const auto& k : build_kernels(p)) {
      const auto back = digital_line(k.theta_deg + 180.0, p.stick_length);
      CHECK(as_set(back) == as_set(k.middle));
    }
  }

  TEST_CASE("digital lines are 8-connected runs through the origin") {
    for (double theta = 0.0; theta < 180.0; theta += 4.5) {
      const auto line = digital_line(theta, 11);
      REQUIRE(line.size() == 11);
      CHECK(line[5] == Offset2{0, 0});
      for (std::size_t i = 1; i < line.size(); ++i) {
        CHECK(std::max(std::abs(line[i].du - line[i - 1].du), std::abs(line[i].dv - line[i - 1].dv)) == 1);
      }
    }
  }

  TEST_CASE("stick differentials of a constant slice vanish") {
    FilterParams p;
    const Image2D<float> img(20, 17, 42.5f);
    for (const auto& k : build_kernels(p)) {
      const auto d = stick_differentials(img, k, p);
      for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        CHECK(d.perp_max.pixels[i] == 0.0f);
        CHECK(d.perp_min.pixels[i] == 0.0f);
        CHECK(d.parallel.pixels[i] == 0.0f);
      }
    }
  }

  TEST_CASE("horizontal bright line at theta = 0") {
    FilterParams p;
    const auto img = line_image(32, 32, 16);
    const auto d = stick_differentials(img, build_kernels(p).front(), p);
    for (std::size_t u = 0; u < 32; ++u) {
      CHECK(d.perp_max.at(u, 16) == 1.0f);
      CHECK(d.perp_min.at(u, 16) == 1.0f);
      CHECK(d.parallel.at(u, 16) == 0.0f);
    }
  }

  TEST_CASE("stick differentials match the per-pixel oracle on a random 32^2 slice") {
    std::mt19937 rng(7);
    const auto img = oracle::random_slice(32, 32, rng);
    FilterParams p;
    const auto w = static_cast<long>(img.width), h = static_cast<long>(img.height);
    auto sample = [&](long u, long v) {
      return static_cast<double>(img.at(static_cast<std::size_t>(std::clamp(u, 0L, w - 1)),
                                        static_cast<std::size_t>(std::clamp(v, 0L, h - 1))));
    };
    for (const auto& k : build_kernels(p)) {
      const auto d = stick_differentials(img, k, p);
      for (long v = 0; v < h; ++v) {
        for (long u = 0; u < w; ++u) {
          double sl = 0, sm = 0, sr = 0, sq = 0;
          for (std::size_t j = 0; j < k.middle.size(); ++j) {
            sl += sample(u + k.left[j].du, v + k.left[j].dv);
            sm += sample(u + k.middle[j].du, v + k.middle[j].dv);
            sr += sample(u + k.right[j].du, v + k.right[j].dv);
          }
          const double n = 11.0;
          for (const auto& o : k.middle) sq += std::pow(sample(u + o.du, v + o.dv) - sm / n, 2);
          const std::size_t i = static_cast<std::size_t>(u + w * v);
          CHECK(std::abs(d.perp_max.pixels[i] - std::max(sm - sl, sm - sr) / n) <= 1e-6);
          CHECK(std::abs(d.perp_min.pixels[i] - std::min(sm - sl, sm - sr) / n) <= 1e-6);
          CHECK(std::abs(d.parallel.pixels[i] - std::sqrt(sq / n)) <= 1e-6);
        }
      }
    }
  }

  TEST_CASE("line strength of a constant slice is zero") {
    const auto ls = line_strength(Image2D<float>(16, 16, -300.0f), FilterParams{});
    for (std::size_t i = 0; i < 256; ++i) {
      CHECK(ls.f_max.pixels[i] == 0.0f);
      CHECK(ls.f_min.pixels[i] == 0.0f);
    }
  }

  TEST_CASE("bright line pixels choose theta = 0") {
    const auto ls = line_strength(line_image(40, 40, 20), FilterParams{});
    for (std::size_t u = 0; u < 40; ++u) CHECK(ls.orientation.at(u, 20) == 0);
  }

  TEST_CASE("line strength equals the brute-force maximum over orientations") {
    std::mt19937 rng(99);
    FilterParams p;
    for (int rep = 0; rep < 5; ++rep) {
      const auto img = oracle::random_slice(16, 16, rng);
      const auto ls = line_strength(img, p);
      const auto ref = oracle::naive_line_strength(img, p);
      const auto kernels = build_kernels(p);
      for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        CHECK(std::abs(ls.f_max.pixels[i] - ref.f_max[i]) <= 1e-6);
        CHECK(std::abs(ls.f_min.pixels[i] - ref.f_min[i]) <= 1e-6);
        // Orientation: the chosen stick must attain the maximum.
        const auto d = stick_differentials(img, kernels[static_cast<std::size_t>(ls.orientation.pixels[i])], p);
        const double chosen = d.perp_max.pixels[i] - p.kappa * d.parallel.pixels[i];
        CHECK(std::abs(std::max(chosen, 0.0) - ref.f_max[i]) <= 1e-6);
      }
    }
  }

  TEST_CASE("ties pick the smallest orientation index") {
    // Every orientation scores exactly 0 on a flat slice.
    const auto ls = line_strength(Image2D<float>(9, 9, 5.0f), FilterParams{});
    for (auto o : ls.orientation.pixels) CHECK(o == 0);
  }

  TEST_CASE("cascade") {
    FilterParams p;
    SUBCASE("constant slice") {
      const auto r = cascade(Image2D<float>(24, 24, 7.0f), p);
      for (float v : r.response.pixels) CHECK(v == 0.0f);
    }
    SUBCASE("non-negative on random slices") {
      std::mt19937 rng(3);
      for (int rep = 0; rep < 4; ++rep) {
        const auto r = cascade(oracle::random_slice(24, 20, rng), p);
        for (float v : r.response.pixels) CHECK(v >= 0.0f);
      }
    }
    SUBCASE("bright line dominates its surroundings by 10x") {
      const auto r = cascade(line_image(64, 64, 32), p);
      float on_min = INFINITY, off_max = 0.0f;
      for (std::size_t v = 0; v < 64; ++v) {
        for (std::size_t u = 0; u < 64; ++u) {
          if (v == 32) on_min = std::min(on_min, r.response.at(u, v));
          else off_max = std::max(off_max, r.response.at(u, v));
        }
      }
      CHECK(on_min > 0.0f);
      CHECK(on_min >= 10.0f * off_max);
    }
    SUBCASE("orientation comes from the first pass") {
      std::mt19937 rng(8);
      const auto img = oracle::random_slice(20, 20, rng);
      CHECK(cascade(img, p).orientation == line_strength(img, p).orientation);
    }
  }

  TEST_CASE("intensity shift leaves the response unchanged") {
    std::mt19937 rng(12);
    std::uniform_int_distribution<int> u(0, 255);
    Image2D<float> img(20, 20), shifted(20, 20);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = static_cast<float>(u(rng));
      shifted.pixels[i] = img.pixels[i] + 1000.0f;
    }
    const auto a = cascade(img, FilterParams{});
    const auto b = cascade(shifted, FilterParams{});
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      CHECK(std::abs(a.response.pixels[i] - b.response.pixels[i]) <= 1e-3f * std::max(1.0f, a.response.pixels[i]));
    }
  }

  TEST_CASE("run_view") {
    FilterParams p;
    SUBCASE("constant volume gives zero for every view") {
      const ScalarVolume v({20, 18, 16}, {1, 1, 1}, -850.0f);
      for (ViewAxis axis : kAllViews) {
        const auto r = run_view(v, axis, p);
        for (std::size_t i = 0; i < v.size(); ++i) {
          CHECK(r.response[i] == 0.0f);
          CHECK(r.theta_deg[i] >= 0.0f);
          CHECK(r.theta_deg[i] < 180.0f);
        }
      }
    }
    SUBCASE("slab perpendicular to x") {
      // Axial and coronal slices cut the slab as a line. A sagittal slice on
      // the slab is uniformly bright, so it carries no line contrast.
      ScalarVolume v({24, 24, 24}, {1, 1, 1}, -850.0f);
      for (std::size_t z = 0; z < 24; ++z)
        for (std::size_t y = 0; y < 24; ++y) v(12, y, z) = -450.0f;
      const auto s = run_view(v, ViewAxis::sagittal, p);
      const auto a = run_view(v, ViewAxis::axial, p);
      const auto c = run_view(v, ViewAxis::coronal, p);
      for (std::size_t z = 0; z < 24; ++z) {
        for (std::size_t y = 0; y < 24; ++y) {
          CHECK(a.response(12, y, z) > 0.0f);
          CHECK(c.response(12, y, z) > 0.0f);
          CHECK(s.response(12, y, z) == 0.0f);
          CHECK(a.theta_deg(12, y, z) == 90.0f);
          CHECK(c.theta_deg(12, y, z) == 90.0f);
        }
      }
    }
    SUBCASE("serial and parallel schedules agree bitwise") {
      std::mt19937 rng(1);
      std::normal_distribution<float> n(0.0f, 100.0f);
      ScalarVolume v({18, 15, 13}, {1, 1, 1});
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = n(rng);
      for (ViewAxis axis : kAllViews) {
        set_thread_count(1);
        const auto serial = run_view(v, axis, p);
        set_thread_count(5);
        const auto parallel = run_view(v, axis, p);
        set_thread_count(0);
        CHECK(serial.response == parallel.response);
        CHECK(serial.theta_deg == parallel.theta_deg);
      }
    }
  }

  TEST_CASE("fuse_3d") {
    auto fuse_one = [](float a, float s, float c) {
      const Dims d{1, 1, 1};
      const Spacing sp{};
      return fuse_3d(ScalarVolume(d, sp, s), ScalarVolume(d, sp, a), ScalarVolume(d, sp, c))[0];
    };
    CHECK(fuse_one(0, 0, 0) == 0.0f);
    CHECK(fuse_one(1, 1, 1) == 3.0f);
    CHECK(fuse_one(2, 1, 0) == 1.5f);
    CHECK(fuse_one(0, 2, 1) == 1.5f);
    CHECK(fuse_one(0, 0, 5) == 0.0f);
    CHECK_THROWS_AS(fuse_3d(ScalarVolume({2, 1, 1}, {}), ScalarVolume({1, 1, 1}, {}),
                            ScalarVolume({1, 1, 1}, {})),
                    InputError);
  }

  TEST_CASE("vector_field") {
    FilterParams p;
    auto field_of = [&](float fused, float theta) {
      const Dims d{1, 1, 1};
      std::array<ViewResponse, 3> views;
      for (auto& v : views) v = {ScalarVolume(d, {}, 1.0f), ScalarVolume(d, {}, theta)};
      return vector_field(ScalarVolume(d, {}, fused), std::move(views), p);
    };
    SUBCASE("at or below the threshold the vector is zero") {
      const auto f = field_of(0.5f, 30.0f);
      for (ViewAxis a : kAllViews) {
        CHECK_FALSE(f.has_vector(a, 0));
        CHECK(f.view(a).vec_u[0] == 0.0f);
        CHECK(f.view(a).vec_v[0] == 0.0f);
      }
      CHECK_FALSE(field_of(1.0f, 30.0f).has_vector(ViewAxis::axial, 0));
    }
    SUBCASE("theta 0 above threshold points along u") {
      const auto f = field_of(2.0f, 0.0f);
      CHECK(f.view(ViewAxis::sagittal).vec_u[0] == 1.0f);
      CHECK(f.view(ViewAxis::sagittal).vec_v[0] == 0.0f);
      CHECK(f.fused[0] == 2.0f);
    }
    SUBCASE("random field: unit vectors exactly where fused > T") {
      std::mt19937 rng(4);
      std::uniform_real_distribution<float> mag(0.0f, 3.0f), ang(0.0f, 179.99f);
      const Dims d{10, 9, 8};
      ScalarVolume fused(d, {});
      std::array<ViewResponse, 3> views;
      for (auto& v : views) v = {ScalarVolume(d, {}), ScalarVolume(d, {})};
      for (std::size_t i = 0; i < fused.size(); ++i) {
        fused[i] = mag(rng);
        for (auto& v : views) v.theta_deg[i] = ang(rng);
      }
      const auto f = vector_field(fused, views, p);
      for (std::size_t i = 0; i < fused.size(); ++i) {
        for (ViewAxis a : kAllViews) {
          const double n = std::hypot(f.view(a).vec_u[i], f.view(a).vec_v[i]);
          if (fused[i] > p.threshold) {
            CHECK(std::abs(n - 1.0) <= 1e-5);
          } else {
            CHECK(n == 0.0);
          }
        }
      }
    }
  }

  TEST_CASE("full filter: zero response and non-negativity") {
    const ScalarVolume flat({16, 16, 16}, {1, 1, 1}, 12.0f);
    const auto f = odos_filter(flat, FilterParams{});
    for (std::size_t i = 0; i < flat.size(); ++i) {
      CHECK(f.fused[i] == 0.0f);
      for (ViewAxis a : kAllViews) CHECK_FALSE(f.has_vector(a, i));
    }
    std::mt19937 rng(2);
    std::normal_distribution<float> n(0.0f, 50.0f);
    ScalarVolume v({16, 16, 16}, {1, 1, 1});
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = n(rng);
    const auto g = odos_filter(v, FilterParams{});
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(g.fused[i] >= 0.0f);
      for (ViewAxis a : kAllViews) CHECK(g.view(a).response[i] >= 0.0f);
    }
  }
}
