#pragma once

// Parameters, bare-state bases and state containers shared by every module.
//
// Units: time is measured in units of the Gaussian width sigma and every rate
// (g0, detuning, gamma) in units of 1/sigma. With the default sigma = 1 the
// numbers passed around are exactly the dimensionless products g0*sigma etc.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cavqed {

using cplx = std::complex<double>;

struct SystemParams {
  double g0 = 28.3929;     // peak coupling of atom 1
  double epsilon = 1.0;    // g2 = epsilon * g1
  double sigma = 1.0;      // Gaussian time width
  double delta = 1.0;      // half delay, delta = dt / (2 sigma)
  double detuning = 0.0;   // Delta
  double gamma = 0.0;      // cavity field decay rate
  int n_max = -1;          // Fock truncation; negative means "derive from the state"
  double t_start = -12.0;  // integration window, units of sigma
  double t_end = 12.0;

  /// Throws ErrorKind::domain when an invariant is violated.
  void validate() const;

  double tau(double t) const { return t / (2.0 * sigma); }
  double time_of_tau(double tau) const { return 2.0 * sigma * tau; }
  double t_begin() const { return t_start * sigma; }
  double t_finish() const { return t_end * sigma; }
};

/// Photon cap used when the caller leaves n_max unset: one photon above the
/// highest excitation number present, so loss never hits the boundary.
int default_n_max(int max_excitations);

enum class Level : std::uint8_t { ground = 0, excited = 1 };

enum class Subsystem : std::uint8_t { cavity = 0, atom1 = 1, atom2 = 2 };

/// Product state |photons; atom1, atom2>.
struct BareState {
  int photons = 0;
  Level atom1 = Level::ground;
  Level atom2 = Level::ground;

  int excitations() const;
  Level atom(int which) const { return which == 1 ? atom1 : atom2; }
  std::string to_string() const;  // e.g. "|1;g1e2>"
  friend bool operator==(const BareState&, const BareState&) = default;
};

/// Ordered list of bare states. Two flavours exist:
///   manifold(N): the fixed-excitation block, ordered
///                [|n,ee>, |n+1,ge>, |n+1,eg>, |n+2,gg>] with n = N - 2 and
///                negative photon numbers dropped (dim 4, 3 or 1);
///   full(n_max): every |m; s1 s2> with m <= n_max, index m*4 + 2*s1 + s2.
class Basis {
 public:
  enum class Kind { manifold, full };

  static Basis manifold(int excitations);
  static Basis full(int n_max);

  Kind kind() const { return kind_; }
  bool is_full() const { return kind_ == Kind::full; }
  /// Excitation number of a manifold basis.
  int excitations() const;
  /// Photon cap of a full basis.
  int n_max() const;
  /// Base photon index n = N - 2 of a manifold basis.
  int base_photons() const { return excitations() - 2; }

  std::size_t size() const { return labels_.size(); }
  const BareState& label(std::size_t i) const { return labels_.at(i); }
  std::span<const BareState> labels() const { return labels_; }
  std::optional<std::size_t> find(const BareState& s) const;
  /// Throws ErrorKind::unknown_label.
  std::size_t index(const BareState& s) const;

  /// Highest excitation number present among the labels.
  int max_excitations() const;

  std::string describe() const;

  friend bool operator==(const Basis& a, const Basis& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_;
  }

 private:
  Basis(Kind kind, int param, std::vector<BareState> labels);

  Kind kind_;
  int param_;
  std::vector<BareState> labels_;
};

Basis manifold_basis(int excitations);
Basis full_basis(int n_max);

/// Index of |m; s1 s2> in a full basis without building one.
constexpr std::size_t full_index(int photons, Level a1, Level a2) {
  return static_cast<std::size_t>(photons) * 4 + 2 * static_cast<std::size_t>(a1) +
         static_cast<std::size_t>(a2);
}

struct PureState {
  Basis basis;
  Eigen::VectorXcd amplitudes;

  PureState(Basis b, Eigen::VectorXcd amps);

  /// Unit amplitude on a single bare state.
  static PureState bare(const Basis& b, const BareState& s);

  double norm() const { return amplitudes.norm(); }
  PureState normalized() const;
  cplx amplitude(const BareState& s) const { return amplitudes(basis.index(s)); }
};

struct DensityMatrix {
  Basis basis;
  Eigen::MatrixXcd matrix;

  DensityMatrix(Basis b, Eigen::MatrixXcd m);

  static DensityMatrix from_pure(const PureState& psi);

  double trace() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// trace within 1e-8, Hermitian within 1e-10, eigenvalues >= -1e-8.
  bool is_valid(double trace_tol = 1e-8, double herm_tol = 1e-10, double eig_tol = 1e-8) const;
};

/// Copy a manifold state into the full basis. Throws ErrorKind::truncation if
/// a label needs more photons than the full basis holds.
PureState embed(const PureState& state, const Basis& full);

/// Restrict a full-basis state to a manifold block (amplitudes only, no
/// renormalisation).
PureState project(const PureState& state, const Basis& manifold);

}  // namespace cavqed
