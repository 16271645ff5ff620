#pragma once

// Data-parallel inner loops shared by the Fock oracle and the classical
// Layer-1 evaluators. Every kernel has a portable scalar reference and,
// on x86-64, an AVX2+FMA variant. The variant is picked once at first use
// from CPUID; EAMAC_SIMD=scalar|avx2 in the environment overrides it.

#include <complex>
#include <span>
#include <string_view>

namespace eamac::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Best variant this CPU can run.
Isa detected_isa();

Isa active_isa();

// Pin the dispatch table. Throws DomainError when the CPU lacks the ISA.
void set_active_isa(Isa isa);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

// y[i] *= x[i] over complex entries
void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x);

// y[i] += a * x[i] over complex entries with a complex scalar
void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y);

namespace scalar {
void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x);
void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define EAMAC_HAVE_AVX2_KERNELS 1
namespace avx2 {
void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x);
void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y);
}  // namespace avx2
#endif

}  // namespace eamac::simd
