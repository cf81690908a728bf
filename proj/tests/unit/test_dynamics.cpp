#include <doctest.h>

#include <cmath>
#include <random>

#include "cavqed/dynamics.hpp"
#include "cavqed/hamiltonian.hpp"
#include "cavqed/kernels.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cavqed;

namespace {

PureState random_state(const Basis& b, unsigned seed, int max_excitations = 1000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = b.label(i).excitations() <= max_excitations ? cplx(g(rng), g(rng)) : 0.0;
  return PureState(b, v).normalized();
}

double infidelity(const PureState& a, const PureState& b) { return 1.0 - std::abs(a.amplitudes.dot(b.amplitudes)); }

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("single-atom vacuum Rabi flop matches the pulse area") {
    SystemParams p;
    p.g0 = 1.3;
    p.epsilon = 0.0;  // atom 2 never couples
    const auto b = Basis::manifold(1);
    const auto out = propagate_schrodinger(PureState::bare(b, {0, Level::excited, Level::ground}), p);
    const double area = oracle::simpson([&](double t) { return oracle::eta1(t, p.g0, p.delta); }, -12.0, 12.0);
    CHECK(std::abs(out.amplitude({0, Level::excited, Level::ground}) - cplx(std::cos(area), 0.0)) < 1e-8);
    CHECK(std::abs(out.amplitude({1, Level::ground, Level::ground}) - cplx(0.0, -std::sin(area))) < 1e-8);
    CHECK(std::abs(out.amplitude({0, Level::ground, Level::excited})) < 1e-12);
  }

  TEST_CASE("free evolution picks up the detuning phase") {
    SystemParams p;
    p.g0 = 0.0;
    p.detuning = 0.37;
    const auto full = Basis::full(1);
    const auto out = propagate_schrodinger(PureState::bare(full, {0, Level::excited, Level::excited}), p);
    const double span = p.t_end - p.t_start;
    CHECK(std::abs(out.amplitude({0, Level::excited, Level::excited}) - std::polar(1.0, -2.0 * p.detuning * span)) <
          1e-8);
  }

  TEST_CASE("norm is conserved before renormalisation") {
    SystemParams p;
    p.epsilon = 0.9;
    p.detuning = 2.0;
    PropagationStats stats;
    const auto psi = random_state(Basis::manifold(3), 4);
    const auto out = propagate_schrodinger(psi, p, {}, &stats);
    CHECK(stats.norm_error < 1e-7);
    CHECK(stats.accepted > 0);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("excitation number is conserved without loss") {
    SystemParams p;
    p.epsilon = 1.1;
    p.detuning = 1.0;
    const auto full = Basis::full(3);
    const auto psi = random_state(full, 9, 3);
    const auto out = propagate_schrodinger(psi, p);
    for (int n = 0; n <= 3; ++n) {
      double before = 0.0, after = 0.0;
      for (std::size_t i = 0; i < full.size(); ++i)
        if (full.label(i).excitations() == n) {
          before += std::norm(psi.amplitudes(static_cast<Eigen::Index>(i)));
          after += std::norm(out.amplitudes(static_cast<Eigen::Index>(i)));
        }
      CHECK(std::abs(after - before) < 1e-7);
    }
  }

  TEST_CASE("adaptive and exponential-oracle propagators agree") {
    SUBCASE("manifold, asymmetric, detuned") {
      SystemParams p;
      p.epsilon = 0.9;
      p.detuning = 2.0;
      const auto psi = random_state(Basis::manifold(2), 1);
      const auto a = propagate_schrodinger(psi, p);
      const auto o = oracle_propagate(psi, p, p.sigma / 200.0);
      CHECK(infidelity(a, o) < 1e-6);
    }
    SUBCASE("full space") {
      SystemParams p;
      p.g0 = 18.9286;
      const auto psi = random_state(Basis::full(2), 2, 2);
      const auto a = propagate_schrodinger(psi, p);
      PropagationConfig cfg;
      cfg.method = PropagationConfig::Method::oracle;
      const auto o = propagate_schrodinger(psi, p, cfg);
      CHECK(infidelity(a, o) < 1e-6);
    }
  }

  TEST_CASE("result does not depend on the kernel ISA") {
    SystemParams p;
    p.epsilon = 0.95;
    const auto psi = random_state(Basis::full(3), 3, 3);
    const auto before = kernels::active_isa();
    kernels::set_isa(kernels::Isa::scalar);
    const auto s = propagate_schrodinger(psi, p);
    kernels::set_isa(kernels::Isa::avx2);
    const auto v = propagate_schrodinger(psi, p);
    kernels::set_isa(before);
    CHECK((s.amplitudes - v.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("Schroedinger propagation refuses loss") {
    SystemParams p;
    p.gamma = 0.1;
    const auto psi = PureState::bare(Basis::manifold(1), {1, Level::ground, Level::ground});
    CHECK(kind_of([&] { propagate_schrodinger(psi, p); }) == ErrorKind::wrong_propagator);
  }

  TEST_CASE("step-size underflow is reported as stiffness") {
    SystemParams p;
    PropagationConfig cfg;
    cfg.rel_tol = 1e-300;
    cfg.abs_tol = 1e-300;
    const auto psi = PureState::bare(Basis::manifold(2), {1, Level::excited, Level::ground});
    CHECK(kind_of([&] { propagate_schrodinger(psi, p, cfg); }) == ErrorKind::stiffness);
  }

  TEST_CASE("population above the photon cap is a truncation error") {
    SystemParams p;
    const auto full = Basis::full(1);
    const auto psi = PureState::bare(full, {1, Level::excited, Level::excited});
    CHECK(kind_of([&] { propagate_schrodinger(psi, p); }) == ErrorKind::truncation);
    p.gamma = 0.1;
    CHECK(kind_of([&] { propagate_lindblad(DensityMatrix::from_pure(psi), p); }) == ErrorKind::truncation);
  }

  TEST_CASE("Lindblad without loss reproduces the pure state") {
    SystemParams p;
    p.epsilon = 0.9;
    const auto psi = random_state(Basis::full(3), 5, 2);
    const auto pure = propagate_schrodinger(psi, p);
    const auto rho = propagate_lindblad(DensityMatrix::from_pure(psi), p);
    const Eigen::MatrixXcd want = pure.amplitudes * pure.amplitudes.adjoint();
    CHECK((rho.matrix - want).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("empty cavity decay follows the exponential law") {
    SystemParams p;
    p.g0 = 0.0;
    p.gamma = 0.05;
    const auto full = Basis::full(2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(12);
    v(full.index({0, Level::ground, Level::ground})) = std::sqrt(0.5);
    v(full.index({1, Level::ground, Level::ground})) = std::sqrt(0.5);
    const auto rho = propagate_lindblad(DensityMatrix::from_pure(PureState(full, v)), p);
    const double span = p.t_end - p.t_start;
    const auto i0 = full.index({0, Level::ground, Level::ground});
    const auto i1 = full.index({1, Level::ground, Level::ground});
    CHECK(rho.matrix(i1, i1).real() == doctest::Approx(0.5 * std::exp(-p.gamma * span)).epsilon(1e-8));
    CHECK(std::abs(rho.matrix(i0, i1)) == doctest::Approx(0.5 * std::exp(-0.5 * p.gamma * span)).epsilon(1e-8));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("Lindblad keeps trace, Hermiticity and positivity") {
    SystemParams p;
    p.g0 = 18.9286;
    p.gamma = 0.125;
    const auto psi = random_state(Basis::full(3), 6, 2);
    PropagationStats stats;
    const auto rho = propagate_lindblad(DensityMatrix::from_pure(psi), p, {}, &stats);
    CHECK(stats.trace_error < 1e-9);
    CHECK(rho.hermiticity_error() < 1e-14);
    CHECK(rho.min_eigenvalue() >= -1e-7);
    CHECK(rho.purity() < 1.0);
  }

  TEST_CASE("Lindblad agrees with the Liouvillian exponential oracle") {
    SystemParams p;
    p.g0 = 4.0;
    p.gamma = 0.3;
    p.epsilon = 0.8;
    p.t_start = -5.0;
    p.t_end = 5.0;
    const auto psi = random_state(Basis::full(2), 7, 2);
    const auto rho0 = DensityMatrix::from_pure(psi);
    const auto a = propagate_lindblad(rho0, p);
    const auto o = oracle_propagate(rho0, p, p.sigma / 200.0);
    CHECK((a.matrix - o.matrix).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(o.trace() == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("oracle step edge cases") {
    SystemParams p;
    const auto psi = random_state(Basis::manifold(2), 8);
    const auto same = oracle_step(psi, p, 0.3, 0.0);
    CHECK((same.amplitudes - psi.amplitudes).norm() < 1e-15);
    CHECK(kind_of([&] { oracle_propagate(psi, p, 0.01); }) == ErrorKind::domain);
  }

  TEST_CASE("phase gates") {
    const auto full = Basis::full(1);
    const auto psi = random_state(full, 10);
    const auto out = apply_phase_gate(psi, 2, 0.5 * M_PI);
    for (std::size_t i = 0; i < full.size(); ++i) {
      const cplx factor = full.label(i).atom2 == Level::excited ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
      CHECK(std::abs(out.amplitudes(i) - factor * psi.amplitudes(i)) < 1e-15);
    }
    CHECK(kind_of([&] { apply_phase_gate(psi, 0, 1.0); }) == ErrorKind::domain);
  }

  TEST_CASE("config validation") {
    PropagationConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_step = 0.0;
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::domain);
  }
}
