// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// deliberately includes nothing but <cstddef> and the intrinsics header, so
// no ISA-specific copy of a shared inline function can leak into the rest of
// the program.

#include <cstddef>

#if defined(CAVQED_HAVE_AVX2_TU)
#include <immintrin.h>
#endif

namespace cavqed::kernels::avx2 {

#if defined(CAVQED_HAVE_AVX2_TU)

void real_complex_matmul(const double* a, std::size_t n, const double* b, std::size_t k, double* c) {
  const std::size_t rows4 = n & ~std::size_t{3};
  for (std::size_t j = 0; j < k; ++j) {
    const double* bj = b + 2 * n * j;
    double* cj = c + 2 * n * j;
    std::size_t i = 0;
    for (; i < rows4; i += 4) {
      __m256d acc0 = _mm256_setzero_pd();  // rows i, i+1
      __m256d acc1 = _mm256_setzero_pd();  // rows i+2, i+3
      for (std::size_t l = 0; l < n; ++l) {
        const __m256d bv = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(bj + 2 * l));
        const double* al = a + l * n + i;
        const __m256d a01 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(al)), 0x50);
        const __m256d a23 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(al + 2)), 0x50);
        acc0 = _mm256_fmadd_pd(a01, bv, acc0);
        acc1 = _mm256_fmadd_pd(a23, bv, acc1);
      }
      _mm256_storeu_pd(cj + 2 * i, acc0);
      _mm256_storeu_pd(cj + 2 * i + 4, acc1);
    }
    for (; i < n; ++i) {
      __m128d acc = _mm_setzero_pd();
      for (std::size_t l = 0; l < n; ++l) {
        const __m128d bv = _mm_loadu_pd(bj + 2 * l);
        acc = _mm_fmadd_pd(_mm_set1_pd(a[l * n + i]), bv, acc);
      }
      _mm_storeu_pd(cj + 2 * i, acc);
    }
  }
}

void axpy(std::size_t len, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < len; ++i) y[i] += alpha * x[i];
}

void linear_combination(std::size_t len, const double* x, const double* const* terms,
                        const double* coeff, std::size_t count, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d acc = _mm256_loadu_pd(x + i);
    for (std::size_t j = 0; j < count; ++j) {
      if (coeff[j] == 0.0) continue;
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coeff[j]), _mm256_loadu_pd(terms[j] + i), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < len; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < count; ++j)
      if (coeff[j] != 0.0) acc += coeff[j] * terms[j][i];
    out[i] = acc;
  }
}

#else

// Non-x86 builds: the dispatcher never selects these.
void real_complex_matmul(const double*, std::size_t, const double*, std::size_t, double*) {}
void axpy(std::size_t, double, const double*, double*) {}
void linear_combination(std::size_t, const double*, const double* const*, const double*, std::size_t,
                        double*) {}

#endif

}  // namespace cavqed::kernels::avx2
