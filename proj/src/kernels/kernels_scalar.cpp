#include "eamac/kernels.hpp"

#include <cstddef>

namespace eamac::simd::scalar {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Written out so non-finite handling matches the vector path.
    const double yr = y[i].real(), yi = y[i].imag();
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {yr * xr - yi * xi, yr * xi + yi * xr};
  }
}

void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y) {
  const double ar = a.real(), ai = a.imag();
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += std::complex<double>{ar * xr - ai * xi, ar * xi + ai * xr};
  }
}

}  // namespace eamac::simd::scalar
