#include "cavqed/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace cavqed::kernels {

namespace scalar {

void real_complex_matmul(const double* a, std::size_t n, const double* b, std::size_t k, double* c) {
  for (std::size_t j = 0; j < k; ++j) {
    const double* bj = b + 2 * n * j;
    double* cj = c + 2 * n * j;
    for (std::size_t i = 0; i < 2 * n; ++i) cj[i] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double br = bj[2 * l];
      const double bi = bj[2 * l + 1];
      const double* al = a + l * n;
      for (std::size_t i = 0; i < n; ++i) {
        cj[2 * i] += al[i] * br;
        cj[2 * i + 1] += al[i] * bi;
      }
    }
  }
}

void axpy(std::size_t len, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

void linear_combination(std::size_t len, const double* x, const double* const* terms,
                        const double* coeff, std::size_t count, double* out) {
  for (std::size_t i = 0; i < len; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < count; ++j)
      if (coeff[j] != 0.0) acc += coeff[j] * terms[j][i];
    out[i] = acc;
  }
}

}  // namespace scalar

namespace {

bool detect_avx2() {
#if defined(CAVQED_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("CAVQED_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return detect_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
  static const bool available = detect_avx2();
  return available;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void real_complex_matmul(std::span<const double> a, std::size_t n, std::span<const double> b,
                         std::span<double> c) {
  if (n == 0) return;
  if (a.size() < n * n || b.size() % (2 * n) != 0 || c.size() != b.size())
    throw std::invalid_argument("real_complex_matmul: inconsistent extents");
  const std::size_t k = b.size() / (2 * n);
  if (active_isa() == Isa::avx2)
    avx2::real_complex_matmul(a.data(), n, b.data(), k, c.data());
  else
    scalar::real_complex_matmul(a.data(), n, b.data(), k, c.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  if (active_isa() == Isa::avx2)
    avx2::axpy(x.size(), alpha, x.data(), y.data());
  else
    scalar::axpy(x.size(), alpha, x.data(), y.data());
}

void linear_combination(std::span<const double> x, std::span<const double* const> terms,
                        std::span<const double> coeff, std::span<double> out) {
  if (terms.size() != coeff.size() || out.size() != x.size())
    throw std::invalid_argument("linear_combination: size mismatch");
  if (active_isa() == Isa::avx2)
    avx2::linear_combination(x.size(), x.data(), terms.data(), coeff.data(), coeff.size(), out.data());
  else
    scalar::linear_combination(x.size(), x.data(), terms.data(), coeff.data(), coeff.size(),
                               out.data());
}

}  // namespace cavqed::kernels
