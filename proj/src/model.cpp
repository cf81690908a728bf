#include "cavqed/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavqed/error.hpp"

namespace cavqed {

void SystemParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::domain, msg); };
  if (!(g0 >= 0.0) || !std::isfinite(g0)) fail("g0 must be finite and non-negative");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(epsilon >= 0.0)) fail("epsilon must be non-negative");
  if (!(gamma >= 0.0)) fail("gamma must be non-negative");
  if (!std::isfinite(detuning) || !std::isfinite(delta)) fail("delta and detuning must be finite");
  if (!(t_start < t_end)) fail("integration window requires t_start < t_end");
}

int default_n_max(int max_excitations) { return std::max(max_excitations, 0) + 1; }

int BareState::excitations() const {
  return photons + static_cast<int>(atom1) + static_cast<int>(atom2);
}

std::string BareState::to_string() const {
  auto c = [](Level l) { return l == Level::excited ? 'e' : 'g'; };
  std::ostringstream os;
  os << '|' << photons << ';' << c(atom1) << '1' << c(atom2) << "2>";
  return os.str();
}

Basis::Basis(Kind kind, int param, std::vector<BareState> labels)
    : kind_(kind), param_(param), labels_(std::move(labels)) {}

Basis Basis::manifold(int excitations) {
  if (excitations < 0) throw Error(ErrorKind::domain, "excitation number must be >= 0");
  const int n = excitations - 2;
  const BareState candidates[] = {
      {n, Level::excited, Level::excited},
      {n + 1, Level::ground, Level::excited},
      {n + 1, Level::excited, Level::ground},
      {n + 2, Level::ground, Level::ground},
  };
  std::vector<BareState> labels;
  for (const auto& s : candidates)
    if (s.photons >= 0) labels.push_back(s);
  return Basis(Kind::manifold, excitations, std::move(labels));
}

Basis Basis::full(int n_max) {
  if (n_max < 0) throw Error(ErrorKind::domain, "n_max must be >= 0");
  std::vector<BareState> labels;
  labels.reserve(4 * static_cast<std::size_t>(n_max + 1));
  for (int m = 0; m <= n_max; ++m)
    for (Level a1 : {Level::ground, Level::excited})
      for (Level a2 : {Level::ground, Level::excited}) labels.push_back({m, a1, a2});
  return Basis(Kind::full, n_max, std::move(labels));
}

int Basis::excitations() const {
  if (kind_ != Kind::manifold) throw Error(ErrorKind::basis_mismatch, "not a manifold basis");
  return param_;
}

int Basis::n_max() const {
  if (kind_ != Kind::full) throw Error(ErrorKind::basis_mismatch, "not a full basis");
  return param_;
}

std::optional<std::size_t> Basis::find(const BareState& s) const {
  if (kind_ == Kind::full) {
    if (s.photons < 0 || s.photons > param_) return std::nullopt;
    return full_index(s.photons, s.atom1, s.atom2);
  }
  auto it = std::find(labels_.begin(), labels_.end(), s);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Basis::index(const BareState& s) const {
  if (auto i = find(s)) return *i;
  throw Error(ErrorKind::unknown_label, s.to_string() + " is not in " + describe());
}

int Basis::max_excitations() const {
  int best = 0;
  for (const auto& s : labels_) best = std::max(best, s.excitations());
  return best;
}

std::string Basis::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::manifold)
    os << "manifold(N=" << param_ << ")";
  else
    os << "full(n_max=" << param_ << ")";
  return os.str();
}

Basis manifold_basis(int excitations) { return Basis::manifold(excitations); }
Basis full_basis(int n_max) { return Basis::full(n_max); }

PureState::PureState(Basis b, Eigen::VectorXcd amps) : basis(std::move(b)), amplitudes(std::move(amps)) {
  if (static_cast<std::size_t>(amplitudes.size()) != basis.size())
    throw Error(ErrorKind::basis_mismatch, "amplitude count does not match basis size");
}

PureState PureState::bare(const Basis& b, const BareState& s) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
  v(static_cast<Eigen::Index>(b.index(s))) = 1.0;
  return PureState(b, std::move(v));
}

PureState PureState::normalized() const {
  const double n = norm();
  if (n == 0.0) throw Error(ErrorKind::domain, "cannot normalise a zero vector");
  return PureState(basis, amplitudes / n);
}

DensityMatrix::DensityMatrix(Basis b, Eigen::MatrixXcd m) : basis(std::move(b)), matrix(std::move(m)) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (matrix.rows() != n || matrix.cols() != n)
    throw Error(ErrorKind::basis_mismatch, "density matrix shape does not match basis size");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.basis, psi.amplitudes * psi.amplitudes.adjoint());
}

double DensityMatrix::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double trace_tol, double herm_tol, double eig_tol) const {
  return std::abs(trace() - 1.0) <= trace_tol && hermiticity_error() <= herm_tol &&
         min_eigenvalue() >= -eig_tol;
}

PureState embed(const PureState& state, const Basis& full) {
  if (!full.is_full()) throw Error(ErrorKind::basis_mismatch, "embed target must be a full basis");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full.size()));
  for (std::size_t i = 0; i < state.basis.size(); ++i) {
    const auto& s = state.basis.label(i);
    auto j = full.find(s);
    if (!j) {
      throw Error(ErrorKind::truncation,
                  s.to_string() + " needs more photons than " + full.describe() + " holds");
    }
    out(static_cast<Eigen::Index>(*j)) = state.amplitudes(static_cast<Eigen::Index>(i));
  }
  return PureState(full, std::move(out));
}

PureState project(const PureState& state, const Basis& manifold) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(manifold.size()));
  for (std::size_t i = 0; i < manifold.size(); ++i) {
    auto j = state.basis.find(manifold.label(i));
    out(static_cast<Eigen::Index>(i)) = j ? state.amplitudes(static_cast<Eigen::Index>(*j)) : cplx{};
  }
  return PureState(manifold, std::move(out));
}

}  // namespace cavqed
