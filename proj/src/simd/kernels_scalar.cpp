#include "nhlab/simd/kernels.hpp"

namespace nhlab::simd::scalar {

std::complex<double> weighted_cdot(const double* w, const double* a_re, const double* a_im,
                                   const double* b_re, const double* b_im, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // a * conj(b) = (ar*br + ai*bi) + i (ai*br - ar*bi)
    re += w[i] * (a_re[i] * b_re[i] + a_im[i] * b_im[i]);
    im += w[i] * (a_im[i] * b_re[i] - a_re[i] * b_im[i]);
  }
  return {re, im};
}

double weighted_norm2(const double* w, const double* a_re, const double* a_im, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (a_re[i] * a_re[i] + a_im[i] * a_im[i]);
  return s;
}

}  // namespace nhlab::simd::scalar
