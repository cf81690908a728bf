#pragma once

// End-to-end procedures: coupling calibration, one-transit atom entangling,
// and the three-cavity teleportation of a cavity qubit.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cavqed/analysis.hpp"
#include "cavqed/dynamics.hpp"
#include "cavqed/model.hpp"

namespace cavqed {

/// Smallest g0 >= floor / sigma with phi_n(g0) = target (mod 2 pi), to 1e-6 rad.
/// Throws ErrorKind::calibration when no root is bracketed.
SystemParams calibrate_coupling(double target, int n, const SystemParams& tmpl, double floor = 10.0);

struct EntangleResult {
  std::optional<PureState> state;     // gamma = 0
  std::optional<DensityMatrix> rho;   // gamma > 0
  double fidelity = 0.0;
  double success_probability = 0.0;   // weight of the zero-photon part
};

/// (|g1> + |e1>)(|g2> + |e2>)|0> / 2 in the full basis.
PureState entangling_input(const Basis& full);
/// (|g1 g2> + |g1 e2> - |e1 g2> + |e1 e2>)|0> / 2 in the full basis.
PureState entangling_target(const Basis& full);

/// One transit from the product input. Uses a full basis with n_max = 3
/// (or p.n_max when set) and the Lindblad propagator when gamma > 0.
EntangleResult entangle_atoms(const SystemParams& p, const PropagationConfig& config = {});

struct PhaseGate {
  int atom = 1;
  double chi = 0.0;
};

struct CavityStage {
  SystemParams params;
  std::vector<PhaseGate> gates;  // applied after the transit, outside the cavity
};

/// Stages 1 and 3 calibrated to phi_{-1} = pi/2 (mod 2 pi) above `floor`,
/// stage 2 at g0 sigma = 20, gates |e2> -> i|e2> after stage 1 and
/// |e1> -> -i|e1> after stage 2.
std::array<CavityStage, 3> default_teleport_stages(const SystemParams& tmpl = {}, double floor = 20.0);

struct StageDiagnostics {
  double phi_minus1 = 0.0;
  double photons_left = 0.0;  // probability the finished cavity still holds a photon
};

/// Amplitudes of atoms (x) cavity 3 given the photon numbers left in cavities 1 and 2.
struct TeleportBranch {
  std::array<int, 2> left{};
  PureState state;
};

struct TeleportResult {
  std::vector<TeleportBranch> branches;
  ReducedState cavity3;
  double fidelity = 0.0;
  double atoms_ground = 0.0;  // probability that both atoms end in the ground state
  std::array<StageDiagnostics, 3> stages{};
  std::vector<std::string> warnings;
};

/// Cavity 1 starts in alpha|0> + beta|1>, the others in |0>, both atoms in
/// the ground state. Each transit acts on atoms (x) the current cavity; a
/// finished cavity is kept as a branch label, so the result is exact.
TeleportResult teleport(cplx alpha, cplx beta, const std::array<CavityStage, 3>& stages,
                        const PropagationConfig& config = {});

}  // namespace cavqed
