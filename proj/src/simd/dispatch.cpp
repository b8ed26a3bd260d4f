#include <cstdlib>
#include <string>

#include "fissure/simd/kernels.hpp"

namespace fissure::simd {

// Defined in kernels_avx2.cpp, which is built with AVX2 code generation.
const KernelTable* avx2_table();

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported = __builtin_cpu_supports("avx2") != 0;
  return supported ? avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* k = avx2_kernels()) out.push_back(k);
  if (const auto* k = neon_kernels()) out.push_back(k);
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const auto all = available_kernels();
    if (const char* env = std::getenv("FISSURE_ISA")) {
      const std::string want(env);
      for (const auto* k : all) {
        if (want == isa_name(k->isa)) return k;
      }
    }
    return all.back();
  }();
  return *chosen;
}

}  // namespace fissure::simd
