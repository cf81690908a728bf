#pragma once

// Adiabatic (instantaneous) spectrum of the manifold Hamiltonian and the
// phase integrals built from it.
//
// Labelling of the 4-state block at resonance follows the usual convention
//   E1,2 = -/+ E_-,  E3,4 = -/+ E_+,
// so E1 and E2 are the pair that touches zero where eta1 = eta2.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cavqed/model.hpp"

namespace cavqed {

/// {E1, E2, E3, E4} from the resonant closed form. Throws
/// ErrorKind::unsupported_regime when the detuning is non-zero.
std::array<double, 4> closed_form_energies(double t, const SystemParams& p, int n);

struct Eigenpairs {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // columns; largest-magnitude entry made positive
};

Eigenpairs diagonalize(double t, const SystemParams& p, const Basis& basis);

/// Zero of eta1 - eta2 in dimensionless time: tau_c = -ln(epsilon) / (4 delta).
double crossing_time(const SystemParams& p);

struct CrossingEvent {
  enum class Type { exact, avoided };
  Type type = Type::exact;
  double tau = 0.0;
  double gap = 0.0;  // same units as the energies
  std::size_t lower_label = 0;
  std::size_t upper_label = 0;
};

/// Continuity-tracked spectrum. Label i is the i-th lowest level at the first
/// grid point and is followed by maximal eigenvector overlap; the stored
/// vectors are sign-continuous along each label (parallel transport for a real
/// Hamiltonian), not re-normalised to the diagonalize phase convention.
struct SpectrumCurve {
  Basis basis;
  std::vector<double> times;               // units of sigma
  std::vector<double> taus;                // t / (2 sigma)
  std::vector<Eigen::VectorXd> energies;   // energies[k](label)
  std::vector<Eigen::MatrixXd> vectors;    // vectors[k].col(label)
  std::vector<CrossingEvent> crossings;

  std::size_t points() const { return times.size(); }
  std::size_t levels() const { return basis.size(); }
};

/// Throws RefinementError when two continuation candidates have overlaps
/// within 1e-3 of each other.
SpectrumCurve track_spectrum(const SystemParams& p, const Basis& basis, std::span<const double> times);

/// Evenly spaced grid of physical times covering [tau_lo, tau_hi].
std::vector<double> tau_grid(const SystemParams& p, double tau_lo, double tau_hi, std::size_t points);

/// phi_n = integral of E4 over physical time (n >= -1; for n = -1 the
/// integrand is sqrt(eta1^2 + eta2^2)). Requires zero detuning.
double phi_angle(int n, const SystemParams& p);

/// theta_n = int_{-inf}^{t_c} E1 dt + int_{t_c}^{inf} E2 dt, split at the
/// actual crossing. theta_{-1} is zero by definition. Requires zero detuning.
double theta_angle(int n, const SystemParams& p);

/// Large-detuning SWAP phase, 2 sigma g0^2 (1 + eps^2) sqrt(pi/2) / Delta.
double theta_big(const SystemParams& p);
/// Same quantity by quadrature of (eta1^2 + eta2^2) / Delta over time.
double theta_big_quadrature(const SystemParams& p);

/// Zero-energy state (eta1 |0;g1e2> - eta2 |0;e1g2>) / norm on the N = 1 block.
PureState dark_state(double t, const SystemParams& p);

struct MixingAngles {
  double phi_n = 0.0;
  double theta_n = 0.0;
  std::optional<double> Theta;  // only for non-zero detuning
  double tau_c = 0.0;
};

/// phi_n and theta_n evaluated at zero detuning (the detuning of `p` is
/// ignored for them); Theta from the closed form when p.detuning != 0.
MixingAngles mixing_angles(int n, const SystemParams& p);

/// Integration limits (physical time) outside of which both couplings are
/// negligible: tau in [-|delta| - 6, |delta| + 6].
std::pair<double, double> quadrature_window(const SystemParams& p);

}  // namespace cavqed
