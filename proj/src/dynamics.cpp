#include "cavqed/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "cavqed/error.hpp"
#include "cavqed/hamiltonian.hpp"
#include "cavqed/kernels.hpp"

namespace cavqed {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr std::array<double, 1> a2{1.0 / 5};
constexpr std::array<double, 2> a3{3.0 / 40, 9.0 / 40};
constexpr std::array<double, 3> a4{44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr std::array<double, 4> a5{19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
constexpr std::array<double, 5> a6{9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                   -5103.0 / 18656};
constexpr std::array<double, 6> a7{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
// fifth-order minus embedded fourth-order weights
constexpr std::array<double, 7> e7{71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr std::size_t kMaxSteps = 50'000'000;

struct StepControl {
  double rtol, atol, h0, hmax;
};

// Integrates y' = rhs(t, y) from t0 to t1. After every accepted step
// `accepted(t, y)` may modify y in place and returns true when it did, which
// invalidates the FSAL derivative.
template <class Rhs, class Accepted>
void dopri5(Rhs&& rhs, Accepted&& accepted, double t0, double t1, std::vector<double>& y,
            const StepControl& ctl, PropagationStats& stats) {
  const std::size_t len = y.size();
  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(len, 0.0);
  std::vector<double> stage(len), y_new(len), err(len);
  const std::vector<double> zeros(len, 0.0);

  auto combine = [&](const std::vector<double>& base, std::span<const double> coeff, double h,
                     std::vector<double>& out) {
    std::array<const double*, 7> terms{};
    std::array<double, 7> scaled{};
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      terms[j] = k[j].data();
      scaled[j] = h * coeff[j];
    }
    kernels::linear_combination(base, std::span(terms.data(), coeff.size()),
                                std::span(scaled.data(), coeff.size()), out);
  };

  double t = t0;
  double h = std::min(ctl.h0, ctl.hmax);
  rhs(t, y.data(), k[0].data());
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > kMaxSteps) throw Error(ErrorKind::stiffness, "step budget exhausted");
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }
    if (h < 1e-13 * std::max(1.0, std::abs(t)))
      throw Error(ErrorKind::stiffness, "step size underflow at t = " + std::to_string(t));

    combine(y, a2, h, stage);
    rhs(t + c2 * h, stage.data(), k[1].data());
    combine(y, a3, h, stage);
    rhs(t + c3 * h, stage.data(), k[2].data());
    combine(y, a4, h, stage);
    rhs(t + c4 * h, stage.data(), k[3].data());
    combine(y, a5, h, stage);
    rhs(t + c5 * h, stage.data(), k[4].data());
    combine(y, a6, h, stage);
    rhs(t + h, stage.data(), k[5].data());
    combine(y, a7, h, y_new);
    rhs(t + h, y_new.data(), k[6].data());
    combine(zeros, e7, h, err);

    double norm = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double scale = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }

    if (norm <= 1.0) {
      t = final_step ? t1 : t + h;
      y.swap(y_new);
      ++stats.accepted;
      if (accepted(t, y))
        rhs(t, y.data(), k[0].data());
      else
        k[0].swap(k[6]);
      double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (last_rejected) factor = std::min(factor, 1.0);
      h = std::min(h * factor, ctl.hmax);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
      last_rejected = true;
    }
  }
}

StepControl step_control(const PropagationConfig& c, const SystemParams& p) {
  return {c.rel_tol, c.abs_tol, c.initial_step * p.sigma, c.max_step * p.sigma};
}

// Population of states whose raising is clipped by the photon cap (more
// excitations than n_max); for RWA dynamics this is exactly what leaks.
double clipped_population(const Basis& basis, std::span<const double> diag_pop) {
  if (!basis.is_full()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.label(i).excitations() > basis.n_max()) s += diag_pop[i];
  return s;
}

void check_clipped(double pop, double t, const SystemParams& p, PropagationStats& stats) {
  stats.max_clipped_population = std::max(stats.max_clipped_population, pop);
  if (pop <= 1e-6) return;
  const auto c = couplings(t, p);
  if (c.eta1 > 0.0 || c.eta2 > 0.0)
    throw Error(ErrorKind::truncation,
                "population " + std::to_string(pop) + " exceeds the photon cap; raise n_max");
}

Eigen::MatrixXcd generator(const Eigen::MatrixXd& h, double dt) {
  return (cplx(0.0, -dt) * h.cast<cplx>()).exp();
}

std::size_t oracle_steps(double span, double step, const SystemParams& p) {
  if (!(step > 0.0) || step > p.sigma / 200.0 * (1.0 + 1e-12))
    throw Error(ErrorKind::domain, "oracle step must lie in (0, sigma/200]");
  return static_cast<std::size_t>(std::ceil(span / step - 1e-9));
}

}  // namespace

void PropagationConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error(ErrorKind::domain, "tolerances must be positive");
  if (!(initial_step > 0.0) || !(max_step > 0.0)) throw Error(ErrorKind::domain, "step sizes must be positive");
  if (method == Method::oracle && !(oracle_step > 0.0)) throw Error(ErrorKind::domain, "oracle step must be positive");
}

PureState propagate_schrodinger(const PureState& psi0, const SystemParams& p, const PropagationConfig& config,
                                PropagationStats* stats_out) {
  p.validate();
  config.validate();
  if (p.gamma > 0.0)
    throw Error(ErrorKind::wrong_propagator, "cavity decay needs the density-matrix propagator");
  if (config.method == PropagationConfig::Method::oracle)
    return oracle_propagate(psi0, p, config.oracle_step * p.sigma);

  const Basis& basis = psi0.basis;
  const auto terms = HamiltonianTerms::build(basis);
  const std::size_t n = basis.size();
  Eigen::MatrixXd h(n, n);
  std::vector<double> hpsi(2 * n), pop(n);
  PropagationStats stats;

  auto rhs = [&](double t, const double* y, double* dy) {
    terms.assemble(t, p, h);
    kernels::real_complex_matmul(std::span<const double>(h.data(), n * n), n, std::span(y, 2 * n), hpsi);
    // dy = -i H psi
    for (std::size_t i = 0; i < n; ++i) {
      dy[2 * i] = hpsi[2 * i + 1];
      dy[2 * i + 1] = -hpsi[2 * i];
    }
  };
  auto accepted = [&](double t, std::vector<double>& y) {
    if (basis.is_full()) {
      for (std::size_t i = 0; i < n; ++i) pop[i] = y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
      check_clipped(clipped_population(basis, pop), t, p, stats);
    }
    return false;
  };

  std::vector<double> y(2 * n);
  std::copy_n(reinterpret_cast<const double*>(psi0.amplitudes.data()), 2 * n, y.begin());
  dopri5(rhs, accepted, p.t_begin(), p.t_finish(), y, step_control(config, p), stats);

  Eigen::VectorXcd out(n);
  std::copy_n(y.begin(), 2 * n, reinterpret_cast<double*>(out.data()));
  const double norm = out.norm();
  stats.norm_error = std::abs(norm - psi0.norm());
  if (stats_out) *stats_out = stats;
  return PureState(basis, out / norm * psi0.norm());
}

DensityMatrix propagate_lindblad(const DensityMatrix& rho0, const SystemParams& p, const PropagationConfig& config,
                                 PropagationStats* stats_out) {
  p.validate();
  config.validate();
  const Basis& basis = rho0.basis;
  if (!basis.is_full()) throw Error(ErrorKind::basis_mismatch, "cavity decay needs a full basis");
  if (config.method == PropagationConfig::Method::oracle)
    return oracle_propagate(rho0, p, config.oracle_step * p.sigma);

  const auto terms = HamiltonianTerms::build(basis);
  const std::size_t n = basis.size();
  const int cap = basis.n_max();
  Eigen::MatrixXd h(n, n);
  std::vector<double> x(2 * n * n), pop(n);

  // photon number and a-matrix element per row: (a rho a+)_ij = s_i s_j rho_{i+4, j+4}
  std::vector<double> photons(n), lower(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int m = basis.label(i).photons;
    photons[i] = m;
    if (m < cap) lower[i] = std::sqrt(static_cast<double>(m + 1));
  }
  const double g = p.gamma;
  PropagationStats stats;

  auto rhs = [&](double t, const double* y, double* dy) {
    terms.assemble(t, p, h);
    kernels::real_complex_matmul(std::span<const double>(h.data(), n * n), n, std::span(y, 2 * n * n), x);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ij = 2 * (i + j * n), ji = 2 * (j + i * n);
        // -i (X - X^dagger)
        double re = x[ij + 1] + x[ji + 1];
        double im = -(x[ij] - x[ji]);
        if (g > 0.0) {
          const double decay = -0.5 * g * (photons[i] + photons[j]);
          re += decay * y[ij];
          im += decay * y[ij + 1];
          if (lower[i] != 0.0 && lower[j] != 0.0) {
            const std::size_t src = 2 * ((i + 4) + (j + 4) * n);
            const double w = g * lower[i] * lower[j];
            re += w * y[src];
            im += w * y[src + 1];
          }
        }
        dy[ij] = re;
        dy[ij + 1] = im;
      }
    }
  };
  auto accepted = [&](double t, std::vector<double>& y) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = j; i < n; ++i) {
        const std::size_t ij = 2 * (i + j * n), ji = 2 * (j + i * n);
        const double re = 0.5 * (y[ij] + y[ji]);
        const double im = 0.5 * (y[ij + 1] - y[ji + 1]);
        y[ij] = y[ji] = re;
        y[ij + 1] = im;
        y[ji + 1] = -im;
      }
      pop[j] = y[2 * (j + j * n)];
    }
    check_clipped(clipped_population(basis, pop), t, p, stats);
    return true;
  };

  std::vector<double> y(2 * n * n);
  std::copy_n(reinterpret_cast<const double*>(rho0.matrix.data()), 2 * n * n, y.begin());
  dopri5(rhs, accepted, p.t_begin(), p.t_finish(), y, step_control(config, p), stats);

  Eigen::MatrixXcd out(n, n);
  std::copy_n(y.begin(), 2 * n * n, reinterpret_cast<double*>(out.data()));
  stats.trace_error = std::abs(out.trace().real() - rho0.trace());
  if (stats_out) *stats_out = stats;
  return DensityMatrix(basis, out);
}

PureState oracle_step(const PureState& psi, const SystemParams& p, double t, double dt) {
  const auto terms = HamiltonianTerms::build(psi.basis);
  return PureState(psi.basis, generator(terms.at(t + 0.5 * dt, p), dt) * psi.amplitudes);
}

PureState oracle_propagate(const PureState& psi0, const SystemParams& p, double step) {
  p.validate();
  const double t0 = p.t_begin(), t1 = p.t_finish();
  const std::size_t count = oracle_steps(t1 - t0, step, p);
  const double dt = (t1 - t0) / static_cast<double>(count);
  const auto terms = HamiltonianTerms::build(psi0.basis);
  Eigen::VectorXcd psi = psi0.amplitudes;
  for (std::size_t s = 0; s < count; ++s) {
    const double mid = t0 + (static_cast<double>(s) + 0.5) * dt;
    psi = generator(terms.at(mid, p), dt) * psi;
  }
  return PureState(psi0.basis, psi);
}

DensityMatrix oracle_propagate(const DensityMatrix& rho0, const SystemParams& p, double step) {
  p.validate();
  const Basis& basis = rho0.basis;
  if (!basis.is_full()) throw Error(ErrorKind::basis_mismatch, "cavity decay needs a full basis");
  const double t0 = p.t_begin(), t1 = p.t_finish();
  const std::size_t count = oracle_steps(t1 - t0, step, p);
  const double dt = (t1 - t0) / static_cast<double>(count);
  const auto terms = HamiltonianTerms::build(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());

  if (p.gamma == 0.0) {
    Eigen::MatrixXcd rho = rho0.matrix;
    for (std::size_t s = 0; s < count; ++s) {
      const Eigen::MatrixXcd u = generator(terms.at(t0 + (static_cast<double>(s) + 0.5) * dt, p), dt);
      rho = u * rho * u.adjoint();
    }
    return DensityMatrix(basis, rho);
  }

  // Column-stacked vec: vec(A rho B) = (B^T kron A) vec(rho).
  const Eigen::MatrixXcd a = annihilation(basis).cast<cplx>();
  const Eigen::MatrixXcd num = a.adjoint() * a;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  auto kron = [n](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd k(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = x(i, j) * y;
    return k;
  };
  const Eigen::MatrixXcd dissipator =
      p.gamma * kron(a.conjugate(), a) - 0.5 * p.gamma * (kron(id, num) + kron(num.transpose(), id));

  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.matrix.data(), n * n);
  for (std::size_t s = 0; s < count; ++s) {
    const Eigen::MatrixXcd hc = terms.at(t0 + (static_cast<double>(s) + 0.5) * dt, p).cast<cplx>();
    const Eigen::MatrixXcd liouville =
        cplx(0.0, -1.0) * (kron(id, hc) - kron(hc.transpose(), id)) + dissipator;
    v = (dt * liouville).exp() * v;
  }
  return DensityMatrix(basis, Eigen::Map<Eigen::MatrixXcd>(v.data(), n, n));
}

PureState apply_phase_gate(const PureState& psi, int atom, double chi) {
  if (atom != 1 && atom != 2) throw Error(ErrorKind::domain, "atom index must be 1 or 2");
  Eigen::VectorXcd amps = psi.amplitudes;
  const cplx phase = std::polar(1.0, chi);
  for (std::size_t i = 0; i < psi.basis.size(); ++i)
    if (psi.basis.label(i).atom(atom) == Level::excited) amps(static_cast<Eigen::Index>(i)) *= phase;
  return PureState(psi.basis, amps);
}

}  // namespace cavqed
