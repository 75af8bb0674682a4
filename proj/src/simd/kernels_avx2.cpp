// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "nhlab/simd/kernels.hpp"

namespace nhlab::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

std::complex<double> weighted_cdot(const double* w, const double* a_re, const double* a_im,
                                   const double* b_re, const double* b_im, std::size_t n) {
  // Two independent accumulator pairs hide FMA latency.
  __m256d re0 = _mm256_setzero_pd(), im0 = _mm256_setzero_pd();
  __m256d re1 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d ar = _mm256_loadu_pd(a_re + i), ai = _mm256_loadu_pd(a_im + i);
    __m256d br = _mm256_loadu_pd(b_re + i), bi = _mm256_loadu_pd(b_im + i);
    __m256d ww = _mm256_loadu_pd(w + i);
    __m256d pr = _mm256_fmadd_pd(ai, bi, _mm256_mul_pd(ar, br));
    __m256d pi = _mm256_fmsub_pd(ai, br, _mm256_mul_pd(ar, bi));
    re0 = _mm256_fmadd_pd(ww, pr, re0);
    im0 = _mm256_fmadd_pd(ww, pi, im0);

    ar = _mm256_loadu_pd(a_re + i + 4), ai = _mm256_loadu_pd(a_im + i + 4);
    br = _mm256_loadu_pd(b_re + i + 4), bi = _mm256_loadu_pd(b_im + i + 4);
    ww = _mm256_loadu_pd(w + i + 4);
    pr = _mm256_fmadd_pd(ai, bi, _mm256_mul_pd(ar, br));
    pi = _mm256_fmsub_pd(ai, br, _mm256_mul_pd(ar, bi));
    re1 = _mm256_fmadd_pd(ww, pr, re1);
    im1 = _mm256_fmadd_pd(ww, pi, im1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d ar = _mm256_loadu_pd(a_re + i), ai = _mm256_loadu_pd(a_im + i);
    __m256d br = _mm256_loadu_pd(b_re + i), bi = _mm256_loadu_pd(b_im + i);
    __m256d ww = _mm256_loadu_pd(w + i);
    __m256d pr = _mm256_fmadd_pd(ai, bi, _mm256_mul_pd(ar, br));
    __m256d pi = _mm256_fmsub_pd(ai, br, _mm256_mul_pd(ar, bi));
    re0 = _mm256_fmadd_pd(ww, pr, re0);
    im0 = _mm256_fmadd_pd(ww, pi, im0);
  }
  double re = hsum(_mm256_add_pd(re0, re1));
  double im = hsum(_mm256_add_pd(im0, im1));
  for (; i < n; ++i) {
    re += w[i] * (a_re[i] * b_re[i] + a_im[i] * b_im[i]);
    im += w[i] * (a_im[i] * b_re[i] - a_re[i] * b_im[i]);
  }
  return {re, im};
}

double weighted_norm2(const double* w, const double* a_re, const double* a_im, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d ar = _mm256_loadu_pd(a_re + i), ai = _mm256_loadu_pd(a_im + i);
    __m256d m = _mm256_fmadd_pd(ai, ai, _mm256_mul_pd(ar, ar));
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), m, acc0);
    ar = _mm256_loadu_pd(a_re + i + 4), ai = _mm256_loadu_pd(a_im + i + 4);
    m = _mm256_fmadd_pd(ai, ai, _mm256_mul_pd(ar, ar));
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), m, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d ar = _mm256_loadu_pd(a_re + i), ai = _mm256_loadu_pd(a_im + i);
    __m256d m = _mm256_fmadd_pd(ai, ai, _mm256_mul_pd(ar, ar));
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), m, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * (a_re[i] * a_re[i] + a_im[i] * a_im[i]);
  return s;
}

}  // namespace nhlab::simd::avx2
