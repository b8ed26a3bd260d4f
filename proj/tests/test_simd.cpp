#include <doctest.h>

#include <cstring>
#include <random>

#include "fissure/odos.hpp"
#include "fissure/simd/kernels.hpp"
#include "oracles.hpp"

using namespace fissure;
using simd::KernelTable;

namespace {

template <typename T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar is always available and listed first") {
    const auto all = simd::available_kernels();
    REQUIRE_FALSE(all.empty());
    CHECK(all.front()->isa == simd::Isa::scalar);
    CHECK(std::string(simd::isa_name(simd::Isa::avx2)) == "avx2");
    MESSAGE("active kernel set: " << simd::isa_name(simd::active_kernels().isa));
  }

  TEST_CASE("raw kernels agree bitwise with the scalar reference") {
    const KernelTable& ref = simd::scalar_kernels();
    std::mt19937 rng(31);
    std::normal_distribution<float> n(0.0f, 200.0f);
    const std::ptrdiff_t stride = 64;
    std::vector<float> img(64 * 64);
    for (auto& v : img) v = n(rng);
    const float* center = img.data() + 20 * stride + 20;

    for (const KernelTable* kt : simd::available_kernels()) {
      CAPTURE(simd::isa_name(kt->isa));
      FilterParams p;
      for (const auto& k : build_kernels(p)) {
        std::vector<std::ptrdiff_t> l, m, r;
        for (std::size_t j = 0; j < k.middle.size(); ++j) {
          l.push_back(k.left[j].dv * stride + k.left[j].du);
          m.push_back(k.middle[j].dv * stride + k.middle[j].du);
          r.push_back(k.right[j].dv * stride + k.right[j].du);
        }
        for (std::size_t count : {1u, 7u, 8u, 9u, 17u, 24u}) {
          std::vector<float> a1(count), a2(count), a3(count), b1(count), b2(count), b3(count);
          ref.stick_differentials(center, l.data(), m.data(), r.data(), 11, count, a1.data(), a2.data(), a3.data());
          kt->stick_differentials(center, l.data(), m.data(), r.data(), 11, count, b1.data(), b2.data(), b3.data());
          CHECK(bitwise_equal(a1, b1));
          CHECK(bitwise_equal(a2, b2));
          CHECK(bitwise_equal(a3, b3));
        }
      }

      for (std::size_t count : {1u, 5u, 8u, 13u, 16u, 31u}) {
        std::vector<float> pmax(count), pmin(count), par(count), c(count);
        for (std::size_t i = 0; i < count; ++i) {
          pmax[i] = n(rng);
          pmin[i] = pmax[i] - std::abs(n(rng));
          par[i] = std::abs(n(rng));
          c[i] = std::abs(n(rng));
        }
        // Repeat a value so ties are exercised.
        pmax[count / 2] = pmax[0];
        std::vector<float> bm1(count, -1.0f), bn1(count, -1.0f), bm2 = bm1, bn2 = bn1;
        std::vector<std::int32_t> bi1(count, 3), bi2(count, 3);
        for (std::int32_t o = 0; o < 4; ++o) {
          ref.strength_update(pmax.data(), pmin.data(), par.data(), 0.7f, o, count, bm1.data(), bn1.data(), bi1.data());
          kt->strength_update(pmax.data(), pmin.data(), par.data(), 0.7f, o, count, bm2.data(), bn2.data(), bi2.data());
        }
        CHECK(bitwise_equal(bm1, bm2));
        CHECK(bitwise_equal(bn1, bn2));
        CHECK(bi1 == bi2);

        std::vector<float> a = pmax, b = par, cc = c;
        for (auto& v : a) v = std::abs(v);
        a[0] = b[0] = cc[0] = 0.0f;  // the singular case
        std::vector<float> f1(count), f2(count);
        ref.fuse3(a.data(), b.data(), cc.data(), count, f1.data());
        kt->fuse3(a.data(), b.data(), cc.data(), count, f2.data());
        CHECK(bitwise_equal(f1, f2));
        CHECK(f1[0] == 0.0f);
      }
    }
  }

  TEST_CASE("filter outputs are identical for every kernel set") {
    std::mt19937 rng(77);
    std::normal_distribution<float> n(-700.0f, 150.0f);
    ScalarVolume v({21, 19, 11}, {1, 1, 1});
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = n(rng);
    FilterParams p;
    const auto ref = odos_filter(v, p, simd::scalar_kernels());
    for (const KernelTable* kt : simd::available_kernels()) {
      CAPTURE(simd::isa_name(kt->isa));
      const auto got = odos_filter(v, p, *kt);
      CHECK(got.fused == ref.fused);
      for (ViewAxis a : kAllViews) {
        CHECK(got.view(a).response == ref.view(a).response);
        CHECK(got.view(a).theta_deg == ref.view(a).theta_deg);
      }
    }
  }
}
