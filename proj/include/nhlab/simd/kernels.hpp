#pragma once
// Data-parallel inner loops used by the quadrature paths.
//
// Complex samples are stored split (separate real and imaginary arrays) so
// both the scalar reference and the vector variants stream contiguous doubles.
// The variant is chosen once per process from the CPU features; setting the
// environment variable NHLAB_SIMD=scalar forces the reference kernels.

#include <complex>
#include <cstddef>
#include <string_view>

namespace nhlab::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Sum of w[i] * a[i] * conj(b[i]).
using WeightedCdotFn = std::complex<double> (*)(const double* w, const double* a_re, const double* a_im,
                                                const double* b_re, const double* b_im, std::size_t n);
/// Sum of w[i] * |a[i]|^2.
using WeightedNorm2Fn = double (*)(const double* w, const double* a_re, const double* a_im, std::size_t n);

struct KernelTable {
  Isa isa;
  WeightedCdotFn weighted_cdot;
  WeightedNorm2Fn weighted_norm2;
};

const KernelTable& scalar_kernels();
/// Null when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// The table selected for this process.
const KernelTable& kernels();

inline std::complex<double> weighted_cdot(const double* w, const double* a_re, const double* a_im,
                                          const double* b_re, const double* b_im, std::size_t n) {
  return kernels().weighted_cdot(w, a_re, a_im, b_re, b_im, n);
}

inline double weighted_norm2(const double* w, const double* a_re, const double* a_im, std::size_t n) {
  return kernels().weighted_norm2(w, a_re, a_im, n);
}

namespace scalar {
std::complex<double> weighted_cdot(const double* w, const double* a_re, const double* a_im,
                                   const double* b_re, const double* b_im, std::size_t n);
double weighted_norm2(const double* w, const double* a_re, const double* a_im, std::size_t n);
}  // namespace scalar

}  // namespace nhlab::simd
