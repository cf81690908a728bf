#pragma once

// Gaussian coupling profiles and the RWA interaction Hamiltonian.
//
// On the full truncated space
//
//   H(t) = Delta * (s1+ s1- + s2+ s2-) + sum_j eta_j(t) (a+ sj- + a sj+),
//
// which is real symmetric in the bare basis. Restricted to the manifold with
// N >= 1 excitations it equals the manifold block below plus Delta * I; the
// N = 0 block is the 1x1 zero in both.

#include <Eigen/Dense>

#include "cavqed/model.hpp"

namespace cavqed {

struct CouplingPair {
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// eta_1 = g0 exp(-(tau+delta)^2), eta_2 = epsilon g0 exp(-(tau-delta)^2),
/// tau = t / (2 sigma). Exponents beyond 50 are returned as exactly zero.
double coupling(int atom, double t, const SystemParams& p);
CouplingPair couplings(double t, const SystemParams& p);

/// Real symmetric operator tagged with the basis it acts on.
struct HermitianOperator {
  Basis basis;
  Eigen::MatrixXd matrix;
};

HermitianOperator manifold_hamiltonian(double t, const SystemParams& p, const Basis& basis);
HermitianOperator full_hamiltonian(double t, const SystemParams& p, const Basis& basis);

/// Time-independent pieces of H for a given basis:
///   H(t) = detuning * diagonal + eta1(t) * atom1 + eta2(t) * atom2.
/// Propagators assemble H from these on every right-hand-side call.
struct HamiltonianTerms {
  Basis basis;
  Eigen::MatrixXd diagonal;  // coefficient of Delta
  Eigen::MatrixXd atom1;     // coefficient of eta1
  Eigen::MatrixXd atom2;     // coefficient of eta2

  static HamiltonianTerms build(const Basis& basis);
  void assemble(double t, const SystemParams& p, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd at(double t, const SystemParams& p) const;
};

/// Cavity annihilation operator on a full basis (photon number clipped at n_max).
Eigen::MatrixXd annihilation(const Basis& full);
/// Diagonal of a+a.
Eigen::VectorXd photon_numbers(const Basis& basis);
/// Diagonal of the total excitation operator (photons + excited atoms).
Eigen::VectorXd excitation_numbers(const Basis& basis);

}  // namespace cavqed
