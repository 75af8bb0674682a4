#include "nhlab/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace nhlab::simd {

#ifdef NHLAB_WITH_AVX2
namespace avx2 {
std::complex<double> weighted_cdot(const double*, const double*, const double*, const double*, const double*,
                                   std::size_t);
double weighted_norm2(const double*, const double*, const double*, std::size_t);
}  // namespace avx2
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, &scalar::weighted_cdot, &scalar::weighted_norm2};
  return table;
}

const KernelTable* avx2_kernels() {
#ifdef NHLAB_WITH_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{Isa::avx2, &avx2::weighted_cdot, &avx2::weighted_norm2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  static const KernelTable& selected = []() -> const KernelTable& {
    if (const char* env = std::getenv("NHLAB_SIMD"); env != nullptr && std::string(env) == "scalar")
      return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return selected;
}

}  // namespace nhlab::simd
