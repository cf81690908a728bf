#include <doctest.h>

#include <vector>

#include "cavqed/kernels.hpp"
#include "oracles.hpp"

using namespace cavqed;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar matmul against a naive product") {
    for (int n : {1, 3, 4, 12, 16, 17}) {
      for (int k : {1, 5, n}) {
        const auto a = oracle::random_doubles(static_cast<std::size_t>(n * n), 11 + n);
        const auto braw = oracle::random_doubles(static_cast<std::size_t>(2 * n * k), 29 + k);
        std::vector<std::complex<double>> b(static_cast<std::size_t>(n * k));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = {braw[2 * i], braw[2 * i + 1]};
        const auto want = oracle::matmul(a, n, b, k);
        std::vector<double> c(braw.size());
        kernels::scalar::real_complex_matmul(a.data(), n, braw.data(), k, c.data());
        for (std::size_t i = 0; i < want.size(); ++i) {
          CHECK(c[2 * i] == doctest::Approx(want[i].real()).epsilon(1e-13));
          CHECK(c[2 * i + 1] == doctest::Approx(want[i].imag()).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("AVX2 kernels agree with the scalar reference") {
    if (!kernels::avx2_available()) {
      MESSAGE("AVX2 not available on this machine; equivalence not exercised");
      return;
    }
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 12u, 16u, 33u}) {
      for (std::size_t k : {std::size_t{1}, std::size_t{3}, n}) {
        const auto a = oracle::random_doubles(n * n, 7 * n);
        const auto b = oracle::random_doubles(2 * n * k, 13 * k + n);
        std::vector<double> c_ref(b.size()), c_simd(b.size());
        kernels::scalar::real_complex_matmul(a.data(), n, b.data(), k, c_ref.data());
        kernels::avx2::real_complex_matmul(a.data(), n, b.data(), k, c_simd.data());
        CHECK(max_diff(c_ref, c_simd) < 1e-13);
      }
    }
    for (std::size_t len : {1u, 2u, 3u, 4u, 7u, 8u, 9u, 31u, 512u, 513u}) {
      const auto x = oracle::random_doubles(len, 3 + len);
      auto y_ref = oracle::random_doubles(len, 5 + len);
      auto y_simd = y_ref;
      kernels::scalar::axpy(len, 0.37, x.data(), y_ref.data());
      kernels::avx2::axpy(len, 0.37, x.data(), y_simd.data());
      CHECK(max_diff(y_ref, y_simd) < 1e-15);

      std::vector<std::vector<double>> terms;
      std::vector<const double*> ptrs;
      for (unsigned j = 0; j < 6; ++j) {
        terms.push_back(oracle::random_doubles(len, 100 + j));
        ptrs.push_back(terms.back().data());
      }
      const std::vector<double> coeff{0.1, 0.0, -2.5, 1e-3, 3.0, -0.7};
      std::vector<double> o_ref(len), o_simd(len);
      kernels::scalar::linear_combination(len, x.data(), ptrs.data(), coeff.data(), coeff.size(), o_ref.data());
      kernels::avx2::linear_combination(len, x.data(), ptrs.data(), coeff.data(), coeff.size(), o_simd.data());
      CHECK(max_diff(o_ref, o_simd) < 1e-14);
    }
  }

  TEST_CASE("dispatch can be pinned to the scalar path") {
    const auto before = kernels::active_isa();
    CHECK(kernels::set_isa(kernels::Isa::scalar) == kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
    const auto isa = kernels::set_isa(kernels::Isa::avx2);
    CHECK(isa == (kernels::avx2_available() ? kernels::Isa::avx2 : kernels::Isa::scalar));
    kernels::set_isa(before);
    CHECK(kernels::to_string(kernels::Isa::scalar) == "scalar");
  }

  TEST_CASE("dispatching entry points") {
    const auto x = oracle::random_doubles(10, 1);
    auto y = oracle::random_doubles(10, 2);
    auto want = y;
    for (std::size_t i = 0; i < y.size(); ++i) want[i] += 2.0 * x[i];
    kernels::axpy(2.0, x, y);
    CHECK(max_diff(y, want) < 1e-15);
  }
}
