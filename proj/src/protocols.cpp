#include "cavqed/protocols.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "cavqed/error.hpp"
#include "cavqed/spectrum.hpp"

namespace cavqed {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kStageCap = 2;             // photon cap of the per-stage space
constexpr double kLeftoverWarning = 1e-2;

double phi_at(double g0, int n, SystemParams p) {
  p.g0 = g0;
  return phi_angle(n, p);
}

// Transit operator on atoms (x) one cavity. Columns with more excitations than
// the cap are left zero; the caller checks they are never populated.
Eigen::MatrixXcd transit_operator(const SystemParams& params, const Basis& basis, const PropagationConfig& config) {
  SystemParams p = params;
  p.gamma = 0.0;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& label = basis.label(static_cast<std::size_t>(i));
    if (label.excitations() > basis.n_max()) continue;
    u.col(i) = propagate_schrodinger(PureState::bare(basis, label), p, config).amplitudes;
  }
  return u;
}

Eigen::VectorXcd gate_phases(const Basis& basis, const std::vector<PhaseGate>& gates) {
  Eigen::VectorXcd d = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (const auto& g : gates)
      if (basis.label(i).atom(g.atom) == Level::excited) d(static_cast<Eigen::Index>(i)) *= std::polar(1.0, g.chi);
  return d;
}

bool same_transit(const SystemParams& a, const SystemParams& b) {
  return a.g0 == b.g0 && a.epsilon == b.epsilon && a.sigma == b.sigma && a.delta == b.delta &&
         a.detuning == b.detuning && a.t_start == b.t_start && a.t_end == b.t_end;
}

}  // namespace

SystemParams calibrate_coupling(double target, int n, const SystemParams& tmpl, double floor) {
  if (!(target > 0.0)) throw Error(ErrorKind::domain, "target angle must be positive");
  if (!(floor > 0.0)) throw Error(ErrorKind::domain, "calibration floor must be positive");
  const double g_lo = floor / tmpl.sigma;
  const double phi_lo = phi_at(g_lo, n, tmpl);

  // first branch target + 2 pi k at or above phi(floor)
  const double goal = target + kTwoPi * std::ceil((phi_lo - target) / kTwoPi);
  auto f = [&](double g) { return phi_at(g, n, tmpl) - goal; };
  if (f(g_lo) == 0.0) {
    SystemParams out = tmpl;
    out.g0 = g_lo;
    return out;
  }

  double g_hi = 2.0 * g_lo;
  for (int i = 0; f(g_hi) < 0.0; ++i) {
    if (i > 40) throw Error(ErrorKind::calibration, "phi_n does not reach the target angle");
    g_hi *= 2.0;
  }

  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [a, b] = boost::math::tools::toms748_solve(f, g_lo, g_hi, tol, iters);
  SystemParams out = tmpl;
  out.g0 = 0.5 * (a + b);
  const double miss = std::abs(phi_angle(n, out) - goal);
  if (miss >= 1e-6)
    throw Error(ErrorKind::calibration, "calibration missed the target by " + std::to_string(miss) + " rad");
  return out;
}

PureState entangling_input(const Basis& full) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full.size()));
  for (auto a1 : {Level::ground, Level::excited})
    for (auto a2 : {Level::ground, Level::excited}) v(full.index({0, a1, a2})) = 0.5;
  return PureState(full, v);
}

PureState entangling_target(const Basis& full) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full.size()));
  v(full.index({0, Level::ground, Level::ground})) = 0.5;
  v(full.index({0, Level::ground, Level::excited})) = 0.5;
  v(full.index({0, Level::excited, Level::ground})) = -0.5;
  v(full.index({0, Level::excited, Level::excited})) = 0.5;
  return PureState(full, v);
}

EntangleResult entangle_atoms(const SystemParams& p, const PropagationConfig& config) {
  p.validate();
  const Basis full = Basis::full(p.n_max >= 2 ? p.n_max : 3);
  const PureState input = entangling_input(full);
  const PureState target = entangling_target(full);

  EntangleResult r;
  if (p.gamma > 0.0) {
    DensityMatrix rho = propagate_lindblad(DensityMatrix::from_pure(input), p, config);
    for (std::size_t i = 0; i < 4; ++i) r.success_probability += rho.matrix(i, i).real();
    r.fidelity = fidelity(rho, target);
    r.rho = std::move(rho);
  } else {
    PureState psi = propagate_schrodinger(input, p, config);
    r.success_probability = psi.amplitudes.head(4).squaredNorm();
    r.fidelity = fidelity(psi, target);
    r.state = std::move(psi);
  }
  return r;
}

std::array<CavityStage, 3> default_teleport_stages(const SystemParams& tmpl, double floor) {
  const double half_pi = 0.5 * std::numbers::pi;
  const SystemParams outer = calibrate_coupling(half_pi, -1, tmpl, floor);
  SystemParams middle = tmpl;
  middle.g0 = 20.0 / tmpl.sigma;
  return {CavityStage{outer, {PhaseGate{2, half_pi}}}, CavityStage{middle, {PhaseGate{1, -half_pi}}},
          CavityStage{outer, {}}};
}

TeleportResult teleport(cplx alpha, cplx beta, const std::array<CavityStage, 3>& stages,
                        const PropagationConfig& config) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
    throw Error(ErrorKind::domain, "|alpha|^2 + |beta|^2 must be 1");
  const Basis basis = Basis::full(kStageCap);
  const auto dim = static_cast<Eigen::Index>(basis.size());

  TeleportResult result;
  std::array<Eigen::MatrixXcd, 3> ops;
  for (std::size_t k = 0; k < 3; ++k) {
    stages[k].params.validate();
    for (const auto& g : stages[k].gates)
      if (g.atom != 1 && g.atom != 2) throw Error(ErrorKind::domain, "atom index must be 1 or 2");
    result.stages[k].phi_minus1 = phi_angle(-1, stages[k].params);
    std::size_t j = 0;
    while (j < k && !same_transit(stages[j].params, stages[k].params)) ++j;
    ops[k] = j < k ? ops[j] : transit_operator(stages[k].params, basis, config);
  }
  for (std::size_t k = 0; k < 3; ++k) ops[k] = gate_phases(basis, stages[k].gates).asDiagonal() * ops[k];
  for (std::size_t k : {0u, 2u}) {
    const double off = std::abs(wrap_phase(result.stages[k].phi_minus1 - 0.5 * std::numbers::pi));
    if (off > 0.01)
      result.warnings.push_back("stage " + std::to_string(k + 1) + " phi_-1 is " + std::to_string(off) +
                                " rad away from pi/2 (mod 2 pi)");
  }

  // Branches keyed by the photon numbers left behind in finished cavities.
  std::map<std::vector<int>, Eigen::VectorXcd> branches;
  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(dim);
  start(basis.index({0, Level::ground, Level::ground})) = alpha;
  start(basis.index({1, Level::ground, Level::ground})) = beta;
  branches[{}] = start;

  for (std::size_t k = 0; k < 3; ++k) {
    std::map<std::vector<int>, Eigen::VectorXcd> next;
    for (const auto& [left, v] : branches) {
      for (Eigen::Index i = 0; i < dim; ++i)
        if (basis.label(static_cast<std::size_t>(i)).excitations() > kStageCap && std::abs(v(i)) > 0.0)
          throw Error(ErrorKind::truncation, "teleport input exceeds the per-stage photon cap");
      const Eigen::VectorXcd w = ops[k] * v;
      if (k == 2) {
        next[left] = w;
        continue;
      }
      // hand the atoms to the next (empty) cavity, one branch per photon number left here
      for (int m = 0; m <= kStageCap; ++m) {
        Eigen::VectorXcd atoms = Eigen::VectorXcd::Zero(dim);
        atoms.head(4) = w.segment(4 * m, 4);
        const double weight = atoms.squaredNorm();
        if (weight == 0.0) continue;
        if (m > 0) result.stages[k].photons_left += weight;
        auto key = left;
        key.push_back(m);
        next[key] = atoms;
      }
    }
    branches = std::move(next);
  }
  for (std::size_t k = 0; k < 2; ++k)
    if (result.stages[k].photons_left > kLeftoverWarning)
      result.warnings.push_back("cavity " + std::to_string(k + 1) + " keeps a photon with probability " +
                                std::to_string(result.stages[k].photons_left));

  const Subsystem keep[] = {Subsystem::cavity};
  Eigen::MatrixXcd rho3 = Eigen::MatrixXcd::Zero(kStageCap + 1, kStageCap + 1);
  for (const auto& [left, v] : branches) {
    PureState psi(basis, v);
    rho3 += reduced_state(psi, keep).matrix;
    result.atoms_ground += std::norm(v(0)) + std::norm(v(4)) + std::norm(v(8));
    result.branches.push_back({{left[0], left[1]}, std::move(psi)});
  }
  result.cavity3 = ReducedState{{Subsystem::cavity}, {kStageCap + 1}, rho3};
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(kStageCap + 1);
  target(0) = alpha;
  target(1) = beta;
  result.fidelity = std::clamp(std::sqrt(std::max(0.0, target.dot(rho3 * target).real())), 0.0, 1.0);
  return result;
}

}  // namespace cavqed
