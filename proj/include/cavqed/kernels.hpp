#pragma once

// Dense inner loops used by the propagators, with a scalar reference
// implementation and an AVX2/FMA variant picked once at runtime.
//
// Complex data is passed as interleaved (re, im) doubles, which is the memory
// layout of std::complex<double> and of Eigen's complex matrices.
// Matrices are column-major.

#include <cstddef>
#include <span>
#include <string_view>

namespace cavqed::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True when the CPU supports AVX2 and FMA and the AVX2 kernels were built.
bool avx2_available();

/// ISA used by the dispatching entry points. Defaults to the best available
/// one; the environment variable CAVQED_SIMD=scalar forces the reference path.
Isa active_isa();

/// Override the dispatch target (tests, benchmarks). Requesting avx2 on a
/// machine without it falls back to scalar; returns the ISA now in effect.
Isa set_isa(Isa isa);

/// C = A * B with A a real n x n matrix and B, C complex n x k matrices.
/// `b` and `c` hold 2*n*k doubles each and must not alias.
void real_complex_matmul(std::span<const double> a, std::size_t n, std::span<const double> b,
                         std::span<double> c);

/// y += alpha * x over raw doubles.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out = x + sum_j coeff[j] * terms[j] (j < count). Used for Runge-Kutta
/// stage sums; zero coefficients are skipped.
void linear_combination(std::span<const double> x, std::span<const double* const> terms,
                        std::span<const double> coeff, std::span<double> out);

/// Reference implementations, always available.
namespace scalar {
void real_complex_matmul(const double* a, std::size_t n, const double* b, std::size_t k, double* c);
void axpy(std::size_t len, double alpha, const double* x, double* y);
void linear_combination(std::size_t len, const double* x, const double* const* terms,
                        const double* coeff, std::size_t count, double* out);
}  // namespace scalar

/// AVX2 + FMA implementations. Only call after avx2_available() is true.
namespace avx2 {
void real_complex_matmul(const double* a, std::size_t n, const double* b, std::size_t k, double* c);
void axpy(std::size_t len, double alpha, const double* x, double* y);
void linear_combination(std::size_t len, const double* x, const double* const* terms,
                        const double* coeff, std::size_t count, double* out);
}  // namespace avx2

}  // namespace cavqed::kernels
