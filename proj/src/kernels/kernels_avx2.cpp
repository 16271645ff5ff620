#include "eamac/kernels.hpp"

#if defined(EAMAC_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cstddef>

namespace eamac::simd::avx2 {

namespace {

// std::complex<double> is layout-compatible with double[2].
inline const double* raw(std::span<const std::complex<double>> v) {
  return reinterpret_cast<const double*>(v.data());
}
inline double* raw(std::span<std::complex<double>> v) {
  return reinterpret_cast<double*>(v.data());
}

// (a0 + i a1)(b0 + i b1) for two packed complex numbers per register.
inline __m256d complex_mul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);           // b0 b0 b2 b2
  const __m256d b_im = _mm256_permute_pd(b, 0xF);       // b1 b1 b3 b3
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);       // a1 a0 a3 a2
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

}  // namespace

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double* xp = x.data();
  double* yp = y.data();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(yp + i);
    __m256d y1 = _mm256_loadu_pd(yp + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(xp + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(xp + i + 4), y1);
    _mm256_storeu_pd(yp + i, y0);
    _mm256_storeu_pd(yp + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(yp + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i)));
  }
  for (; i < n; ++i) yp[i] += a * xp[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double* xp = x.data();
  const double* yp = y.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + i + 4), _mm256_loadu_pd(yp + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += xp[i] * yp[i];
  return acc;
}

void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x) {
  const std::size_t n = y.size();
  double* yp = raw(y);
  const double* xp = raw(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    const __m256d vx = _mm256_loadu_pd(xp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, complex_mul(vy, vx));
  }
  for (; i < n; ++i) {
    const double yr = yp[2 * i], yi = yp[2 * i + 1];
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    yp[2 * i] = yr * xr - yi * xi;
    yp[2 * i + 1] = yr * xi + yi * xr;
  }
}

void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y) {
  const std::size_t n = y.size();
  double* yp = raw(y);
  const double* xp = raw(x);
  const __m256d va = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d prod = complex_mul(_mm256_loadu_pd(xp + 2 * i), va);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    yp[2 * i] += a.real() * xr - a.imag() * xi;
    yp[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

}  // namespace eamac::simd::avx2

#endif
