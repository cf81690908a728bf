#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cavqed/analysis.hpp"
#include "cavqed/protocols.hpp"
#include "support.hpp"

using namespace cavqed;

namespace {

constexpr double kPi = std::numbers::pi;

// (|g2>(|g1> - |e1>) + |e2>(e^{-i a}|g1> + e^{-i b}|e1>)) / 2, zero photons
PureState phased_output(const Basis& full, double a, double b) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full.size()));
  v(full.index({0, Level::ground, Level::ground})) = 0.5;
  v(full.index({0, Level::excited, Level::ground})) = -0.5;
  v(full.index({0, Level::ground, Level::excited})) = 0.5 * std::polar(1.0, -a);
  v(full.index({0, Level::excited, Level::excited})) = 0.5 * std::polar(1.0, -b);
  return PureState(full, v);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("entangling fidelity of a phase-distorted output") {
    const auto full = Basis::full(1);
    const auto target = entangling_target(full);
    const std::pair<double, double> cases[] = {{0.0, 0.0}, {kPi, 0.0}, {kPi, kPi}, {0.3, -1.1}, {2.0, 0.7}};
    for (auto [a, b] : cases) {
      const double want = 0.25 * std::abs(2.0 + std::polar(1.0, -a) + std::polar(1.0, -b));
      CHECK(fidelity(phased_output(full, a, b), target) == doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(fidelity(phased_output(full, kPi, 0.0), target) == doctest::Approx(0.5));
    CHECK(fidelity(phased_output(full, kPi, kPi), target) == doctest::Approx(0.0));
  }

  TEST_CASE("fidelity ignores the global phase and agrees for mixed input") {
    const auto full = Basis::full(1);
    const auto target = entangling_target(full);
    auto psi = phased_output(full, 0.4, -0.2);
    const double f = fidelity(psi, target);
    psi.amplitudes *= std::polar(1.0, 1.234);
    CHECK(fidelity(psi, target) == doctest::Approx(f).epsilon(1e-14));
    CHECK(fidelity(DensityMatrix::from_pure(psi), target) == doctest::Approx(f).epsilon(1e-12));
    CHECK(kind_of([&] { (void)fidelity(psi, entangling_target(Basis::full(2))); }) == ErrorKind::basis_mismatch);
  }

  TEST_CASE("reduced states and entropy") {
    const auto full = Basis::full(0);
    const Subsystem a1[] = {Subsystem::atom1};
    SUBCASE("Bell pair") {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
      v(full.index({0, Level::ground, Level::ground})) = std::sqrt(0.5);
      v(full.index({0, Level::excited, Level::excited})) = std::sqrt(0.5);
      const auto r = reduced_state(PureState(full, v), a1);
      CHECK(r.purity() == doctest::Approx(0.5));
      CHECK(entanglement_entropy(r) == doctest::Approx(1.0));
    }
    SUBCASE("partially entangled output") {
      // phase pi/2 on |e1 e2> only: purity 3/4, eigenvalues (2 +- sqrt 2) / 4
      const auto r = reduced_state(phased_output(full, 0.0, 0.5 * kPi), a1);
      CHECK(r.purity() == doctest::Approx(0.75));
      const double l = (2.0 + std::sqrt(2.0)) / 4.0;
      CHECK(entanglement_entropy(r) == doctest::Approx(-l * std::log2(l) - (1 - l) * std::log2(1 - l)));
    }
    SUBCASE("product state") {
      const auto r = reduced_state(entangling_input(full), a1);
      CHECK(r.purity() == doctest::Approx(1.0));
      CHECK(entanglement_entropy(r) == doctest::Approx(0.0));
    }
  }

  TEST_CASE("partial traces keep the trace and the factor order") {
    const auto full = Basis::full(2);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(12);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    const PureState psi = PureState(full, v).normalized();
    const Subsystem keep[] = {Subsystem::cavity, Subsystem::atom2};
    const auto r = reduced_state(psi, keep);
    CHECK(r.dims == std::vector<int>{3, 2});
    CHECK(r.trace() == doctest::Approx(1.0));
    const auto rr = reduced_state(DensityMatrix::from_pure(psi), keep);
    CHECK((r.matrix - rr.matrix).cwiseAbs().maxCoeff() < 1e-14);
    // diagonal of the reduced state is the marginal distribution
    double p11 = 0.0;
    for (auto a1 : {Level::ground, Level::excited}) p11 += std::norm(v(full.index({1, a1, Level::excited})));
    CHECK(r.matrix(3, 3).real() == doctest::Approx(p11 / v.squaredNorm()));
    CHECK(kind_of([&] { reduced_state(psi, std::span<const Subsystem>{}); }) == ErrorKind::domain);
  }

  TEST_CASE("predicted maps are unitary") {
    MixingAngles a;
    for (double phi : {0.0, 0.7, 2.5, 9.1})
      for (double th : {0.0, 1.3, 4.0}) {
        a.phi_n = phi;
        a.theta_n = th;
        for (auto r : {Regime::resonant_symmetric, Regime::resonant_asymmetric}) {
          for (int m : {1, 3}) {
            const auto p = predicted_map(Basis::manifold(m), a, r);
            const auto d = p.rows();
            CHECK((p.adjoint() * p - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-14);
          }
        }
      }
    a.phi_n = 1.0;
    a.theta_n = 2.0 * kPi;
    const auto b = Basis::manifold(2);
    CHECK((predicted_map(b, a, Regime::resonant_asymmetric) - predicted_map(b, a, Regime::resonant_symmetric))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }

  TEST_CASE("regime names") {
    for (auto r : {Regime::resonant_symmetric, Regime::resonant_asymmetric, Regime::large_detuning})
      CHECK(parse_regime(to_string(r)) == r);
    CHECK(kind_of([] { parse_regime("weak"); }) == ErrorKind::domain);
  }

  TEST_CASE("transit matrices are unitary and job-count independent") {
    SystemParams p;
    p.epsilon = 0.9;
    const auto s1 = scatter_matrix(p, 2, {}, 1);
    const auto s4 = scatter_matrix(p, 2, {}, 4);
    CHECK(s1.unitarity_error() < 1e-7);
    CHECK((s1.matrix - s4.matrix).cwiseAbs().maxCoeff() == 0.0);
    p.gamma = 0.1;
    CHECK(kind_of([&] { scatter_matrix(p, 2); }) == ErrorKind::wrong_propagator);
  }

  TEST_CASE("dark-state transfer is robust to coupling ratio and detuning") {
    for (double eps : {0.8, 1.0, 1.2})
      for (double det : {0.0, 2.0, 5.0}) {
        SystemParams p;
        p.epsilon = eps;
        p.detuning = det;
        const auto s = scatter_matrix(p, 1, {}, 4);
        const auto r = check_input_output(s, mixing_angles(-1, p), Regime::resonant_symmetric);
        INFO("eps=" << eps << " detuning=" << det);
        REQUIRE(r.column_residuals[0].has_value());
        CHECK(*r.column_residuals[0] < 5e-3);
      }
  }

  TEST_CASE("asymmetric couplings rotate the excited pair") {
    SystemParams p;
    p.epsilon = 0.9;
    const auto s = scatter_matrix(p, 2, {}, 4);
    const auto r = check_input_output(s, mixing_angles(0, p), Regime::resonant_asymmetric);
    REQUIRE(r.excited_residual.has_value());
    CHECK(*r.excited_residual < 5e-3);
  }

  TEST_CASE("dispersive exchange phase at large detuning") {
    SystemParams p;
    p.g0 = 150.0;
    p.detuning = 1500.0;
    const auto s = scatter_matrix(p, 1, {}, 4);
    const auto& m = s.matrix;
    // |0,ge> -> -|0,eg> and |0,eg> -> e^{-i Theta}|0,ge>
    const double extracted = -std::arg(m(0, 1) / (-m(1, 0)));
    const double want = theta_big(p);
    CHECK(std::abs(wrap_phase(extracted - want)) < 0.05 * std::abs(want));
    CHECK(std::abs(m(1, 0)) > 0.98);
  }

  TEST_CASE("phase acquired through the exact crossing") {
    SystemParams p;
    p.epsilon = 0.9;
    const auto c = check_crossing_phase(p, 0);
    CHECK(c.transfer_probability > 0.999);
    CHECK(c.leakage < 1e-3);
    CHECK(std::abs(wrap_phase(c.phase + theta_angle(0, p))) < 5e-3);
  }

  TEST_CASE("phase wrapping") {
    CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - 2.0 * kPi));
  }
}
