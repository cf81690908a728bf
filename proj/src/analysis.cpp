#include "cavqed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cavqed/error.hpp"
#include "cavqed/parallel.hpp"

namespace cavqed {
namespace {

// Max deviation between S and P over `cols` after multiplying S by the unit
// phase that makes its largest entry (within those columns) match P.
double aligned_residual(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& p, std::span<const Eigen::Index> cols) {
  Eigen::Index best_r = 0, best_c = cols.front();
  double best = -1.0;
  for (auto c : cols)
    for (Eigen::Index r = 0; r < s.rows(); ++r)
      if (std::abs(s(r, c)) > best) {
        best = std::abs(s(r, c));
        best_r = r;
        best_c = c;
      }
  cplx phase(1.0, 0.0);
  const cplx ratio = p(best_r, best_c) * std::conj(s(best_r, best_c));
  if (std::abs(ratio) > 1e-300) phase = ratio / std::abs(ratio);

  double worst = 0.0;
  for (auto c : cols)
    for (Eigen::Index r = 0; r < s.rows(); ++r) worst = std::max(worst, std::abs(s(r, c) * phase - p(r, c)));
  return worst;
}

Eigen::MatrixXcd reduce(const Basis& basis, const Eigen::MatrixXcd& rho, std::span<const Subsystem> keep,
                        std::vector<Subsystem>& kept, std::vector<int>& dims) {
  if (keep.empty()) throw Error(ErrorKind::domain, "reduced_state needs at least one subsystem to keep");
  bool want[3] = {false, false, false};
  for (auto s : keep) want[static_cast<int>(s)] = true;

  int photon_dim = 1;
  for (const auto& l : basis.labels()) photon_dim = std::max(photon_dim, l.photons + 1);
  const int full_dims[3] = {photon_dim, 2, 2};

  kept.clear();
  dims.clear();
  for (int k = 0; k < 3; ++k)
    if (want[k]) {
      kept.push_back(static_cast<Subsystem>(k));
      dims.push_back(full_dims[k]);
    }

  // Split each label into (kept index, traced index).
  const std::size_t n = basis.size();
  std::vector<int> kept_idx(n), rest_idx(n);
  int kept_dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = basis.label(i);
    const int value[3] = {l.photons, static_cast<int>(l.atom1), static_cast<int>(l.atom2)};
    int a = 0, b = 0;
    for (int k = 0; k < 3; ++k) {
      if (want[k])
        a = a * full_dims[k] + value[k];
      else
        b = b * full_dims[k] + value[k];
    }
    kept_idx[i] = a;
    rest_idx[i] = b;
  }
  for (int d : dims) kept_dim *= d;

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kept_dim, kept_dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rest_idx[i] == rest_idx[j])
        out(kept_idx[i], kept_idx[j]) += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace

double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(x, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

double ScatterMatrix::unitarity_error() const {
  const auto n = matrix.rows();
  return (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

ScatterMatrix scatter_matrix(const SystemParams& p, int excitations, const PropagationConfig& config,
                             std::size_t jobs) {
  p.validate();
  if (p.gamma > 0.0) throw Error(ErrorKind::wrong_propagator, "scattering matrices need gamma = 0");
  const Basis basis = Basis::manifold(excitations);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  auto columns = parallel_map<Eigen::VectorXcd>(basis.size(), jobs, [&](std::size_t i) {
    return propagate_schrodinger(PureState::bare(basis, basis.label(i)), p, config).amplitudes;
  });
  Eigen::MatrixXcd s(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) s.col(i) = columns[static_cast<std::size_t>(i)];
  return {basis, s};
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::resonant_symmetric: return "resonant-symmetric";
    case Regime::resonant_asymmetric: return "resonant-asymmetric";
    case Regime::large_detuning: return "large-detuning";
  }
  return "?";
}

Regime parse_regime(std::string_view name) {
  for (auto r : {Regime::resonant_symmetric, Regime::resonant_asymmetric, Regime::large_detuning})
    if (name == to_string(r)) return r;
  throw Error(ErrorKind::domain, "unknown regime '" + std::string(name) + "'");
}

Eigen::MatrixXcd predicted_map(const Basis& basis, const MixingAngles& angles, Regime regime) {
  if (basis.is_full()) throw Error(ErrorKind::basis_mismatch, "predicted maps live on a manifold");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx i1(0.0, 1.0);

  if (regime == Regime::large_detuning) {
    if (dim != 3) throw Error(ErrorKind::unsupported_regime, "the large-detuning map is given for N = 1 only");
    if (!angles.Theta) throw Error(ErrorKind::domain, "large-detuning map needs Theta");
    m(1, 0) = -1.0;
    m(0, 1) = std::polar(1.0, -*angles.Theta);
    return m;
  }

  if (dim == 1) {
    m(0, 0) = 1.0;
    return m;
  }

  const double c = std::cos(angles.phi_n), s = std::sin(angles.phi_n);
  // offset of |n+1,ge> within the block
  const Eigen::Index ge = dim == 4 ? 1 : 0, eg = ge + 1, gg = ge + 2;
  m(eg, ge) = -1.0;
  m(ge, eg) = c;
  m(gg, eg) = -i1 * s;
  m(ge, gg) = -i1 * s;
  m(gg, gg) = c;
  if (dim == 4) {
    if (regime == Regime::resonant_symmetric) {
      m(0, 0) = 1.0;
    } else {
      const double ct = std::cos(angles.theta_n), st = std::sin(angles.theta_n);
      m(0, 0) = ct;
      m(eg, 0) = -i1 * st;
      m(eg, ge) = -ct;
      m(0, ge) = i1 * st;
    }
  }
  return m;
}

RegimeReport check_input_output(const ScatterMatrix& s, const MixingAngles& angles, Regime regime) {
  RegimeReport report;
  report.regime = regime;
  report.predicted = predicted_map(s.basis, angles, regime);
  const auto dim = s.matrix.cols();

  report.checked.assign(static_cast<std::size_t>(dim), true);
  if (regime == Regime::large_detuning) report.checked[2] = false;

  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < dim; ++c)
    if (report.checked[static_cast<std::size_t>(c)]) cols.push_back(c);
  report.residual = aligned_residual(s.matrix, report.predicted, cols);

  report.column_residuals.resize(static_cast<std::size_t>(dim));
  for (auto c : cols) {
    const Eigen::Index one[] = {c};
    report.column_residuals[static_cast<std::size_t>(c)] = aligned_residual(s.matrix, report.predicted, one);
  }
  if (dim == 4) {
    const Eigen::Index excited[] = {0, 1}, ground[] = {2, 3};
    report.excited_residual = aligned_residual(s.matrix, report.predicted, excited);
    report.ground_residual = aligned_residual(s.matrix, report.predicted, ground);
  }
  return report;
}

CrossingPhase check_crossing_phase(const SystemParams& p, int n, const PropagationConfig& config,
                                   std::size_t grid_points) {
  p.validate();
  if (p.detuning != 0.0) throw Error(ErrorKind::unsupported_regime, "the crossing phase needs zero detuning");
  if (n < 0) throw Error(ErrorKind::no_crossing, "the N = 1 block has no exact crossing");
  const Basis basis = Basis::manifold(n + 2);

  // Refine the tracking grid until label continuation is unambiguous.
  std::optional<SpectrumCurve> curve;
  for (int attempt = 0; attempt < 4 && !curve; ++attempt) {
    std::vector<double> times(grid_points);
    const double t0 = p.t_begin(), t1 = p.t_finish();
    for (std::size_t k = 0; k < grid_points; ++k)
      times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    try {
      curve = track_spectrum(p, basis, times);
    } catch (const RefinementError&) {
      if (attempt == 3) throw;
      grid_points = 2 * grid_points - 1;
    }
  }

  constexpr std::size_t label = 1;
  const Eigen::VectorXd start = curve->vectors.front().col(label);
  const auto out = propagate_schrodinger(PureState(basis, start.cast<cplx>()), p, config);

  CrossingPhase r;
  const Eigen::MatrixXd& final_vectors = curve->vectors.back();
  const cplx amp = final_vectors.col(label).cast<cplx>().dot(out.amplitudes);
  const cplx other = final_vectors.col(2).cast<cplx>().dot(out.amplitudes);
  r.phase = wrap_phase(std::arg(amp));
  r.transfer_probability = std::norm(amp);
  r.leakage = std::max(0.0, 1.0 - std::norm(amp) - std::norm(other));

  for (std::size_t k = 1; k < curve->points(); ++k)
    r.dynamical_phase += 0.5 * (curve->times[k] - curve->times[k - 1]) *
                         (curve->energies[k](label) + curve->energies[k - 1](label));

  const Eigen::VectorXd& e_end = curve->energies.back();
  for (Eigen::Index i = 0; i < e_end.size(); ++i)
    if (e_end(i) < e_end(label)) ++r.final_index;

  if (r.leakage > 0.01)
    throw Error(ErrorKind::non_adiabatic,
                "leakage " + std::to_string(r.leakage) + " out of the crossing pair; increase g0");
  return r;
}

double fidelity(const PureState& psi, const PureState& target) {
  if (!(psi.basis == target.basis)) throw Error(ErrorKind::basis_mismatch, "fidelity needs matching bases");
  return std::min(1.0, std::abs(target.amplitudes.dot(psi.amplitudes)));
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (!(rho.basis == target.basis)) throw Error(ErrorKind::basis_mismatch, "fidelity needs matching bases");
  const double v = target.amplitudes.dot(rho.matrix * target.amplitudes).real();
  return std::clamp(std::sqrt(std::max(0.0, v)), 0.0, 1.0);
}

std::vector<double> populations(const PureState& psi, std::span<const BareState> labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(std::norm(psi.amplitudes(psi.basis.index(l))));
  return out;
}

std::vector<double> populations(const DensityMatrix& rho, std::span<const BareState> labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const auto i = static_cast<Eigen::Index>(rho.basis.index(l));
    out.push_back(std::clamp(rho.matrix(i, i).real(), 0.0, 1.0));
  }
  return out;
}

ReducedState reduced_state(const PureState& psi, std::span<const Subsystem> keep) {
  ReducedState r;
  r.matrix = reduce(psi.basis, psi.amplitudes * psi.amplitudes.adjoint(), keep, r.kept, r.dims);
  return r;
}

ReducedState reduced_state(const DensityMatrix& rho, std::span<const Subsystem> keep) {
  ReducedState r;
  r.matrix = reduce(rho.basis, rho.matrix, keep, r.kept, r.dims);
  return r;
}

double entanglement_entropy(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return std::max(0.0, s);
}

double entanglement_entropy(const ReducedState& rho) { return entanglement_entropy(rho.matrix); }

double entanglement_entropy(const DensityMatrix& rho) { return entanglement_entropy(rho.matrix); }

}  // namespace cavqed
