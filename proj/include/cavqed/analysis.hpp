#pragma once

// Input-output maps of a full transit, their comparison with the adiabatic
// predictions, and state diagnostics (fidelity, populations, partial traces).

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cavqed/dynamics.hpp"
#include "cavqed/model.hpp"
#include "cavqed/spectrum.hpp"

namespace cavqed {

/// S(j, i) = <basis_j | U(t_end, t_start) | basis_i> on one excitation manifold.
struct ScatterMatrix {
  Basis basis;
  Eigen::MatrixXcd matrix;

  /// max |S^dagger S - I|
  double unitarity_error() const;
};

/// Columns are propagated independently (and in parallel when jobs != 1).
ScatterMatrix scatter_matrix(const SystemParams& p, int excitations, const PropagationConfig& config = {},
                             std::size_t jobs = 1);

enum class Regime { resonant_symmetric, resonant_asymmetric, large_detuning };

std::string_view to_string(Regime r);
/// Accepts "resonant-symmetric", "resonant-asymmetric", "large-detuning".
Regime parse_regime(std::string_view name);

struct RegimeReport {
  Regime regime = Regime::resonant_symmetric;
  Eigen::MatrixXcd predicted;
  std::vector<bool> checked;  // columns the regime makes a statement about
  /// Max entrywise deviation over the checked columns after one global phase
  /// (fixed by the largest-magnitude entry of S).
  double residual = 0.0;
  /// Same, with a separate phase per column; empty optional when unchecked.
  std::vector<std::optional<double>> column_residuals;
  /// Columns {|n,ee>, |n+1,g1e2>} and {|n+1,e1g2>, |n+2,gg>} with a phase per
  /// sector. Only for 4-state manifolds.
  std::optional<double> excited_residual;
  std::optional<double> ground_residual;
};

/// Adiabatic prediction for a manifold of dimension 3 or 4.
///   resonant-symmetric:  |n,ee> -> |n,ee>, |n+1,ge> -> -|n+1,eg>,
///                        |n+1,eg> -> cos phi |n+1,ge> - i sin phi |n+2,gg>,
///                        |n+2,gg> -> -i sin phi |n+1,ge> + cos phi |n+2,gg>;
///   resonant-asymmetric: excited pair rotated by theta instead,
///                        |n,ee>   ->  cos th |n,ee> - i sin th |n+1,eg>,
///                        |n+1,ge> -> -cos th |n+1,eg> + i sin th |n,ee>;
///   large-detuning (3-state manifold only, atomic columns only):
///                        |0,ge> -> -|0,eg>,  |0,eg> -> exp(-i Theta) |0,ge>.
Eigen::MatrixXcd predicted_map(const Basis& basis, const MixingAngles& angles, Regime regime);

RegimeReport check_input_output(const ScatterMatrix& s, const MixingAngles& angles, Regime regime);

struct CrossingPhase {
  double phase = 0.0;                 // arg <Psi_tracked(+T) | psi(+T)>, in (-pi, pi]
  double transfer_probability = 0.0;  // |<Psi_tracked(+T) | psi(+T)>|^2
  double leakage = 0.0;               // population outside the two crossing levels
  double dynamical_phase = 0.0;       // trapezoid integral of the tracked energy
  std::size_t final_index = 0;        // ascending index of the tracked level at +T
};

/// Starts in the adiabatic level that enters the exact crossing from below
/// (second-lowest level of the 4-state block), propagates the window and reads
/// the phase of the overlap with the same continuity-tracked level at the end.
/// Requires zero detuning and n >= 0. Throws ErrorKind::non_adiabatic when
/// more than 1% leaks out of the crossing pair.
CrossingPhase check_crossing_phase(const SystemParams& p, int n, const PropagationConfig& config = {},
                                   std::size_t grid_points = 2401);

/// Global-phase-invariant overlap: |<target|psi>| or sqrt(<target|rho|target>).
double fidelity(const PureState& psi, const PureState& target);
double fidelity(const DensityMatrix& rho, const PureState& target);

std::vector<double> populations(const PureState& psi, std::span<const BareState> labels);
std::vector<double> populations(const DensityMatrix& rho, std::span<const BareState> labels);

/// Density matrix over a subset of {cavity, atom1, atom2}. The kept factors
/// are ordered cavity, atom1, atom2 with the first one most significant; the
/// cavity factor has dimension (largest photon number in the basis) + 1.
struct ReducedState {
  std::vector<Subsystem> kept;
  std::vector<int> dims;
  Eigen::MatrixXcd matrix;

  double trace() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
};

/// Throws ErrorKind::domain for an empty keep set.
ReducedState reduced_state(const PureState& psi, std::span<const Subsystem> keep);
ReducedState reduced_state(const DensityMatrix& rho, std::span<const Subsystem> keep);

/// von Neumann entropy in bits; eigenvalues below 1e-12 count as zero.
double entanglement_entropy(const Eigen::MatrixXcd& rho);
double entanglement_entropy(const ReducedState& rho);
double entanglement_entropy(const DensityMatrix& rho);

/// Wrap an angle into (-pi, pi].
double wrap_phase(double x);

}  // namespace cavqed
