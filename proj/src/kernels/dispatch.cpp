#include <atomic>
#include <cstdlib>
#include <string>

#include "eamac/errors.hpp"
#include "eamac/kernels.hpp"

namespace eamac::simd {

namespace {

struct Table {
  void (*axpy)(double, std::span<const double>, std::span<double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*cmul)(std::span<std::complex<double>>, std::span<const std::complex<double>>);
  void (*caxpy)(std::complex<double>, std::span<const std::complex<double>>,
                std::span<std::complex<double>>);
};

constexpr Table kScalar{&scalar::axpy, &scalar::dot, &scalar::cmul, &scalar::caxpy};
#if defined(EAMAC_HAVE_AVX2_KERNELS)
constexpr Table kAvx2{&avx2::axpy, &avx2::dot, &avx2::cmul, &avx2::caxpy};
#endif

const Table& table_for(Isa isa) {
#if defined(EAMAC_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("EAMAC_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && detected_isa() == Isa::avx2) return Isa::avx2;
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
#if defined(EAMAC_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) {
    throw DomainError("avx2 kernels requested on a CPU without AVX2/FMA");
  }
  active().store(isa, std::memory_order_relaxed);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  table_for(active_isa()).axpy(a, x, y);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return table_for(active_isa()).dot(x, y);
}

void cmul(std::span<std::complex<double>> y, std::span<const std::complex<double>> x) {
  table_for(active_isa()).cmul(y, x);
}

void caxpy(std::complex<double> a, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y) {
  table_for(active_isa()).caxpy(a, x, y);
}

}  // namespace eamac::simd
