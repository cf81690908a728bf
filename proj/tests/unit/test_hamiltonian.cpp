#include <doctest.h>

#include <cmath>

#include "cavqed/hamiltonian.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cavqed;

TEST_SUITE("hamiltonian") {
  TEST_CASE("Gaussian couplings") {
    SystemParams p;
    p.epsilon = 0.8;
    for (double t : {-5.0, -2.0, 0.0, 0.3, 2.0, 7.5}) {
      const auto c = couplings(t, p);
      CHECK(c.eta1 == doctest::Approx(oracle::eta1(t, p.g0, p.delta)).epsilon(1e-14));
      CHECK(c.eta2 == doctest::Approx(oracle::eta2(t, p.g0, p.epsilon, p.delta)).epsilon(1e-14));
    }
    // peaks at tau = -delta and tau = +delta
    CHECK(coupling(1, p.time_of_tau(-p.delta), p) == doctest::Approx(p.g0));
    CHECK(coupling(2, p.time_of_tau(p.delta), p) == doctest::Approx(p.epsilon * p.g0));
    CHECK(coupling(1, 40.0, p) == 0.0);
    CHECK(kind_of([&] { coupling(3, 0.0, p); }) == ErrorKind::domain);
  }

  TEST_CASE("four-level block matches the hand-written matrix") {
    SystemParams p;
    p.epsilon = 0.9;
    p.detuning = 1.7;
    const double t = 0.4;
    for (int n : {0, 1, 4}) {
      const auto h = manifold_hamiltonian(t, p, Basis::manifold(n + 2)).matrix;
      const double a = oracle::eta1(t, p.g0, p.delta), b = oracle::eta2(t, p.g0, p.epsilon, p.delta);
      const double r1 = std::sqrt(n + 1.0), r2 = std::sqrt(n + 2.0);
      Eigen::Matrix4d want;
      want << p.detuning, a * r1, b * r1, 0,  //
          a * r1, 0, 0, b * r2,               //
          b * r1, 0, 0, a * r2,               //
          0, b * r2, a * r2, -p.detuning;
      CHECK((h - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("three-level and one-level blocks") {
    SystemParams p;
    p.detuning = 2.5;
    const double t = -1.0;
    const auto h1 = manifold_hamiltonian(t, p, Basis::manifold(1)).matrix;
    const double a = oracle::eta1(t, p.g0, p.delta), b = oracle::eta2(t, p.g0, p.epsilon, p.delta);
    Eigen::Matrix3d want;
    want << 0, 0, b, 0, 0, a, b, a, -p.detuning;
    CHECK((h1 - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(manifold_hamiltonian(t, p, Basis::manifold(0)).matrix(0, 0) == 0.0);
  }

  TEST_CASE("full space blocks equal manifold blocks shifted by the detuning") {
    SystemParams p;
    p.epsilon = 1.2;
    p.detuning = 3.0;
    const auto full = Basis::full(4);
    const auto hf = full_hamiltonian(0.7, p, full).matrix;
    CHECK((hf - hf.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int nexc = 1; nexc <= 4; ++nexc) {
      const auto m = Basis::manifold(nexc);
      const auto hm = manifold_hamiltonian(0.7, p, m).matrix;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
          const double shift = i == j ? p.detuning : 0.0;
          CHECK(hf(full.index(m.label(i)), full.index(m.label(j))) == doctest::Approx(hm(i, j) + shift));
        }
    }
  }

  TEST_CASE("excitation number is conserved") {
    SystemParams p;
    p.detuning = 1.0;
    const auto full = Basis::full(3);
    const Eigen::MatrixXd h = full_hamiltonian(0.2, p, full).matrix;
    const Eigen::MatrixXd n = excitation_numbers(full).asDiagonal();
    // only couplings between states with N <= n_max are complete, but every
    // matrix element of H still links equal excitation numbers
    CHECK((h * n - n * h).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("zero coupling leaves the detuning diagonal") {
    SystemParams p;
    p.g0 = 0.0;
    p.detuning = 2.0;
    const auto full = Basis::full(2);
    const auto h = full_hamiltonian(0.0, p, full).matrix;
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto& l = full.label(i);
      CHECK(h(i, i) == p.detuning * (static_cast<int>(l.atom1) + static_cast<int>(l.atom2)));
    }
    CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("annihilation operator") {
    const auto full = Basis::full(3);
    const auto a = annihilation(full);
    const Eigen::MatrixXd n = a.transpose() * a;
    const auto photons = photon_numbers(full);
    CHECK((n - Eigen::MatrixXd(photons.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("basis kind is checked") {
    SystemParams p;
    CHECK(kind_of([&] { manifold_hamiltonian(0.0, p, Basis::full(1)); }) == ErrorKind::basis_mismatch);
    CHECK(kind_of([&] { full_hamiltonian(0.0, p, Basis::manifold(1)); }) == ErrorKind::basis_mismatch);
    CHECK(kind_of([&] { annihilation(Basis::manifold(2)); }) == ErrorKind::basis_mismatch);
  }
}
