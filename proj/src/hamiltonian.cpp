#include "cavqed/hamiltonian.hpp"

#include <cmath>

#include "cavqed/error.hpp"

namespace cavqed {
namespace {

constexpr double kTailExponent = 50.0;

double gaussian(double x) {
  const double e = x * x;
  return e > kTailExponent ? 0.0 : std::exp(-e);
}

}  // namespace

double coupling(int atom, double t, const SystemParams& p) {
  const double tau = p.tau(t);
  switch (atom) {
    case 1: return p.g0 * gaussian(tau + p.delta);
    case 2: return p.epsilon * p.g0 * gaussian(tau - p.delta);
    default: throw Error(ErrorKind::domain, "atom index must be 1 or 2");
  }
}

CouplingPair couplings(double t, const SystemParams& p) {
  return {coupling(1, t, p), coupling(2, t, p)};
}

HamiltonianTerms HamiltonianTerms::build(const Basis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  HamiltonianTerms terms{basis, Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                         Eigen::MatrixXd::Zero(n, n)};

  // Detuning: sum_j sj+ sj- on the full space; diag(1,0,0,-1) on 4-state
  // manifolds and diag(0,0,-1) on the 3-state manifold (the full-space
  // diagonal shifted by -1 inside every block with N >= 1).
  const bool full = basis.is_full();
  const double shift = (!full && basis.excitations() >= 1) ? -1.0 : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = basis.label(static_cast<std::size_t>(i));
    terms.diagonal(i, i) = static_cast<double>(s.atom1) + static_cast<double>(s.atom2) + shift;
  }

  // a+ sj- : |m; ..e_j..> -> sqrt(m+1) |m+1; ..g_j..>
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = basis.label(static_cast<std::size_t>(i));
    for (int atom : {1, 2}) {
      if (s.atom(atom) != Level::excited) continue;
      BareState lowered = s;
      lowered.photons += 1;
      (atom == 1 ? lowered.atom1 : lowered.atom2) = Level::ground;
      auto j = basis.find(lowered);
      if (!j) continue;  // clipped at the truncation
      const double amp = std::sqrt(static_cast<double>(s.photons + 1));
      auto& m = atom == 1 ? terms.atom1 : terms.atom2;
      m(static_cast<Eigen::Index>(*j), i) = amp;
      m(i, static_cast<Eigen::Index>(*j)) = amp;
    }
  }
  return terms;
}

void HamiltonianTerms::assemble(double t, const SystemParams& p, Eigen::MatrixXd& out) const {
  const auto c = couplings(t, p);
  out.noalias() = p.detuning * diagonal;
  if (c.eta1 != 0.0) out.noalias() += c.eta1 * atom1;
  if (c.eta2 != 0.0) out.noalias() += c.eta2 * atom2;
}

Eigen::MatrixXd HamiltonianTerms::at(double t, const SystemParams& p) const {
  Eigen::MatrixXd h(diagonal.rows(), diagonal.cols());
  assemble(t, p, h);
  return h;
}

HermitianOperator manifold_hamiltonian(double t, const SystemParams& p, const Basis& basis) {
  if (basis.is_full()) throw Error(ErrorKind::basis_mismatch, "expected a manifold basis");
  return {basis, HamiltonianTerms::build(basis).at(t, p)};
}

HermitianOperator full_hamiltonian(double t, const SystemParams& p, const Basis& basis) {
  if (!basis.is_full()) throw Error(ErrorKind::basis_mismatch, "expected a full basis");
  return {basis, HamiltonianTerms::build(basis).at(t, p)};
}

Eigen::MatrixXd annihilation(const Basis& full) {
  if (!full.is_full()) throw Error(ErrorKind::basis_mismatch, "annihilation needs a full basis");
  const auto n = static_cast<Eigen::Index>(full.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = full.label(static_cast<std::size_t>(i));
    if (s.photons == 0) continue;
    const auto j = static_cast<Eigen::Index>(full_index(s.photons - 1, s.atom1, s.atom2));
    a(j, i) = std::sqrt(static_cast<double>(s.photons));
  }
  return a;
}

Eigen::VectorXd photon_numbers(const Basis& basis) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = basis.label(i).photons;
  return v;
}

Eigen::VectorXd excitation_numbers(const Basis& basis) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = basis.label(i).excitations();
  return v;
}

}  // namespace cavqed
