#include "cavqed/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavqed/error.hpp"
#include "cavqed/hamiltonian.hpp"

namespace cavqed {
namespace {

constexpr double kDegenerateGap = 1e-8;   // relative to g0
constexpr double kAvoidedGapMax = 0.5;    // relative to g0
constexpr double kAmbiguity = 1e-3;
constexpr double kMinOverlap = 0.5;
constexpr double kDipFactor = 2.0;
constexpr double kTauMargin = 6.0;

double energy_scale(const SystemParams& p) {
  const double s = std::max(p.g0 * std::max(1.0, p.epsilon), std::abs(p.detuning));
  return s > 0.0 ? s : 1.0;
}

void require_resonant(const SystemParams& p, const char* what) {
  if (p.detuning != 0.0)
    throw Error(ErrorKind::unsupported_regime, std::string(what) + " is only defined at zero detuning");
}

// E_-(t) and E_+(t) of the 4-state block (n >= 0), resonant case.
std::pair<double, double> resonant_pair(double t, const SystemParams& p, int n) {
  const auto c = couplings(t, p);
  const double a = c.eta1 * c.eta1;
  const double b = c.eta2 * c.eta2;
  const double s = a + b;
  const double f = std::sqrt(s * s + 16.0 * (n + 1.0) * (n + 2.0) * a * b);
  const double lo = std::max(0.0, 0.5 * ((3.0 + 2.0 * n) * s - f));
  const double hi = 0.5 * ((3.0 + 2.0 * n) * s + f);
  return {std::sqrt(lo), std::sqrt(hi)};
}

template <class F>
double integrate(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, 1e-14, &error);
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  if (v(best) < 0.0) v = -v;
}

}  // namespace

std::array<double, 4> closed_form_energies(double t, const SystemParams& p, int n) {
  require_resonant(p, "closed_form_energies");
  if (n < 0) throw Error(ErrorKind::domain, "closed forms need n >= 0");
  const auto [em, ep] = resonant_pair(t, p, n);
  return {-em, em, -ep, ep};
}

Eigenpairs diagonalize(double t, const SystemParams& p, const Basis& basis) {
  const auto h = manifold_hamiltonian(t, p, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  Eigenpairs out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_sign(out.vectors.col(j));
  return out;
}

double crossing_time(const SystemParams& p) {
  if (!(p.epsilon > 0.0)) throw Error(ErrorKind::domain, "crossing_time needs epsilon > 0");
  if (p.delta == 0.0) {
    if (p.epsilon == 1.0)
      throw Error(ErrorKind::degenerate_everywhere, "eta1 == eta2 at every time when delta = 0, epsilon = 1");
    throw Error(ErrorKind::no_crossing, "eta1 and eta2 never cross when delta = 0");
  }
  return -std::log(p.epsilon) / (4.0 * p.delta);
}

std::vector<double> tau_grid(const SystemParams& p, double tau_lo, double tau_hi, std::size_t points) {
  if (points < 2 || !(tau_hi > tau_lo)) throw Error(ErrorKind::domain, "grid needs >= 2 increasing points");
  std::vector<double> times(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double tau = tau_lo + (tau_hi - tau_lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    times[k] = p.time_of_tau(tau);
  }
  return times;
}

SpectrumCurve track_spectrum(const SystemParams& p, const Basis& basis, std::span<const double> times) {
  if (times.size() < 2) throw Error(ErrorKind::domain, "track_spectrum needs at least two grid points");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw Error(ErrorKind::domain, "grid must be strictly increasing");

  const auto terms = HamiltonianTerms::build(basis);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const double scale = energy_scale(p);
  const double degenerate = kDegenerateGap * scale;

  SpectrumCurve curve{basis, {}, {}, {}, {}, {}};
  curve.times.assign(times.begin(), times.end());
  curve.taus.reserve(times.size());
  for (double t : times) curve.taus.push_back(p.tau(t));

  Eigen::MatrixXd h(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (std::size_t k = 0; k < times.size(); ++k) {
    terms.assemble(times[k], p, h);
    es.compute(h);
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();

    if (k == 0) {
      Eigen::MatrixXd v0 = v;
      for (Eigen::Index j = 0; j < dim; ++j) fix_sign(v0.col(j));
      curve.energies.push_back(w);
      curve.vectors.push_back(std::move(v0));
      continue;
    }

    // Group numerically degenerate eigenvalues into clusters.
    std::vector<std::vector<Eigen::Index>> clusters;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!clusters.empty() && w(j) - w(clusters.back().back()) <= degenerate)
        clusters.back().push_back(j);
      else
        clusters.push_back({j});
    }

    const Eigen::MatrixXd& prev = curve.vectors.back();
    const Eigen::MatrixXd overlap = prev.transpose() * v;  // (label, eigen index)
    const auto nc = clusters.size();
    Eigen::MatrixXd weight(dim, static_cast<Eigen::Index>(nc));
    for (std::size_t c = 0; c < nc; ++c)
      for (Eigen::Index l = 0; l < dim; ++l) {
        double s = 0.0;
        for (auto j : clusters[c]) s += overlap(l, j) * overlap(l, j);
        weight(l, static_cast<Eigen::Index>(c)) = std::sqrt(s);
      }

    // Ambiguity and continuity checks per label.
    for (Eigen::Index l = 0; l < dim; ++l) {
      double best = -1.0, second = -1.0;
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(nc); ++c) {
        const double x = weight(l, c);
        if (x > best) {
          second = best;
          best = x;
        } else if (x > second) {
          second = x;
        }
      }
      if (best < kMinOverlap || (second >= 0.0 && best - second < kAmbiguity)) {
        throw RefinementError("eigenvector continuation is ambiguous near tau = " +
                                  std::to_string(p.tau(times[k])) + "; refine the grid",
                              2 * times.size());
      }
    }

    // Greedy assignment of labels to clusters by descending weight.
    std::vector<std::tuple<double, Eigen::Index, std::size_t>> candidates;
    for (Eigen::Index l = 0; l < dim; ++l)
      for (std::size_t c = 0; c < nc; ++c) candidates.emplace_back(weight(l, static_cast<Eigen::Index>(c)), l, c);
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<int> label_cluster(static_cast<std::size_t>(dim), -1);
    std::vector<std::size_t> capacity(nc);
    for (std::size_t c = 0; c < nc; ++c) capacity[c] = clusters[c].size();
    for (const auto& [wgt, l, c] : candidates) {
      if (label_cluster[static_cast<std::size_t>(l)] >= 0 || capacity[c] == 0) continue;
      label_cluster[static_cast<std::size_t>(l)] = static_cast<int>(c);
      --capacity[c];
    }

    Eigen::VectorXd e_new(dim);
    Eigen::MatrixXd v_new(dim, dim);
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index l = 0; l < dim; ++l)
        if (label_cluster[static_cast<std::size_t>(l)] == static_cast<int>(c)) members.push_back(l);
      const auto& idx = clusters[c];
      if (idx.size() == 1) {
        const Eigen::Index l = members.front();
        Eigen::VectorXd vec = v.col(idx.front());
        if (vec.dot(prev.col(l)) < 0.0) vec = -vec;
        v_new.col(l) = vec;
        e_new(l) = w(idx.front());
        continue;
      }
      // Degenerate cluster: carry the previous vectors into the cluster
      // subspace (projection + Gram-Schmidt) so the labels stay continuous.
      Eigen::MatrixXd sub(dim, static_cast<Eigen::Index>(idx.size()));
      for (std::size_t q = 0; q < idx.size(); ++q) sub.col(static_cast<Eigen::Index>(q)) = v.col(idx[q]);
      std::vector<Eigen::VectorXd> done;
      for (auto l : members) {
        Eigen::VectorXd vec = sub * (sub.transpose() * prev.col(l));
        for (const auto& u : done) vec -= u.dot(vec) * u;
        const double nrm = vec.norm();
        if (nrm < 1e-12) throw RefinementError("lost a label inside a degenerate cluster", 2 * times.size());
        vec /= nrm;
        done.push_back(vec);
        v_new.col(l) = vec;
      }
      // Energies inside the cluster: Rayleigh quotients, matched in order.
      std::vector<std::pair<double, Eigen::Index>> rq;
      for (auto l : members) rq.emplace_back(v_new.col(l).dot(h * v_new.col(l)), l);
      std::sort(rq.begin(), rq.end());
      for (std::size_t q = 0; q < rq.size(); ++q) e_new(rq[q].second) = w(idx[q]);
    }
    curve.energies.push_back(std::move(e_new));
    curve.vectors.push_back(std::move(v_new));
  }

  // Crossing detection over every label pair.
  const std::size_t npts = times.size();
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a + 1; b < dim; ++b) {
      std::vector<double> d(npts);
      for (std::size_t k = 0; k < npts; ++k) d[k] = curve.energies[k](a) - curve.energies[k](b);

      // Exact crossings: sign change across (possibly) a run of degenerate points.
      int last_sign = 0;
      std::size_t last_idx = 0;
      for (std::size_t k = 0; k < npts; ++k) {
        if (std::abs(d[k]) <= degenerate) continue;
        const int s = d[k] > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) {
          double tau_c;
          if (k == last_idx + 1) {
            const double f = d[last_idx] / (d[last_idx] - d[k]);
            tau_c = curve.taus[last_idx] + f * (curve.taus[k] - curve.taus[last_idx]);
          } else {
            tau_c = 0.5 * (curve.taus[last_idx + 1] + curve.taus[k - 1]);
          }
          curve.crossings.push_back({CrossingEvent::Type::exact, tau_c, 0.0, static_cast<std::size_t>(a),
                                     static_cast<std::size_t>(b)});
        }
        last_sign = s;
        last_idx = k;
      }

      // Avoided crossings: interior local minima of |d| inside the gap window.
      for (std::size_t k = 1; k + 1 < npts; ++k) {
        const double g = std::abs(d[k]);
        if (!(g < std::abs(d[k - 1]) && g <= std::abs(d[k + 1]))) continue;
        if (g <= degenerate || g >= kAvoidedGapMax * scale) continue;
        if ((d[k - 1] > 0) != (d[k + 1] > 0)) continue;
        const double lo = std::min(curve.energies[k](a), curve.energies[k](b));
        const double hi = std::max(curve.energies[k](a), curve.energies[k](b));
        bool adjacent = true;
        for (Eigen::Index c = 0; c < dim && adjacent; ++c) {
          if (c == a || c == b) continue;
          const double e = curve.energies[k](c);
          if (e > lo && e < hi) adjacent = false;
        }
        if (!adjacent) continue;
        // Require a real dip: the gap has to open to twice its minimum on both
        // sides inside the grid. Shoulders of smoothly separating levels don't.
        std::size_t kl = k, kr = k;
        while (kl > 0 && std::abs(d[kl]) < kDipFactor * g) --kl;
        while (kr + 1 < npts && std::abs(d[kr]) < kDipFactor * g) ++kr;
        if (std::abs(d[kl]) < kDipFactor * g || std::abs(d[kr]) < kDipFactor * g) continue;
        // Parabolic refinement of the minimum location.
        const double g0v = std::abs(d[k - 1]), g2v = std::abs(d[k + 1]);
        const double denom = g0v - 2.0 * g + g2v;
        double tau_min = curve.taus[k];
        if (denom > 0.0) {
          const double h_tau = curve.taus[k + 1] - curve.taus[k];
          tau_min += 0.5 * h_tau * (g0v - g2v) / denom;
        }
        const std::size_t lower = curve.energies[k](a) < curve.energies[k](b) ? static_cast<std::size_t>(a)
                                                                              : static_cast<std::size_t>(b);
        const std::size_t upper = lower == static_cast<std::size_t>(a) ? static_cast<std::size_t>(b)
                                                                       : static_cast<std::size_t>(a);
        curve.crossings.push_back({CrossingEvent::Type::avoided, tau_min, g, lower, upper});
      }
    }
  }
  std::sort(curve.crossings.begin(), curve.crossings.end(),
            [](const CrossingEvent& x, const CrossingEvent& y) { return x.tau < y.tau; });
  return curve;
}

std::pair<double, double> quadrature_window(const SystemParams& p) {
  const double span = std::abs(p.delta) + kTauMargin;
  return {p.time_of_tau(-span), p.time_of_tau(span)};
}

double phi_angle(int n, const SystemParams& p) {
  require_resonant(p, "phi_angle");
  if (n < -1) throw Error(ErrorKind::domain, "phi_angle needs n >= -1");
  if (p.g0 == 0.0) return 0.0;
  const auto [lo, hi] = quadrature_window(p);
  if (n == -1) {
    return integrate(
        [&](double t) {
          const auto c = couplings(t, p);
          return std::hypot(c.eta1, c.eta2);
        },
        lo, hi);
  }
  return integrate([&](double t) { return resonant_pair(t, p, n).second; }, lo, hi);
}

double theta_angle(int n, const SystemParams& p) {
  require_resonant(p, "theta_angle");
  if (n < -1) throw Error(ErrorKind::domain, "theta_angle needs n >= -1");
  if (n == -1 || p.g0 == 0.0) return 0.0;
  const auto [lo, hi] = quadrature_window(p);
  const double tc = std::clamp(p.time_of_tau(crossing_time(p)), lo, hi);
  auto e_minus = [&](double t) { return resonant_pair(t, p, n).first; };
  // E1 = -E_- before the crossing, E2 = +E_- after it.
  return -integrate(e_minus, lo, tc) + integrate(e_minus, tc, hi);
}

double theta_big(const SystemParams& p) {
  if (p.detuning == 0.0) throw Error(ErrorKind::domain, "Theta needs a non-zero detuning");
  return 2.0 * p.sigma * p.g0 * p.g0 * (1.0 + p.epsilon * p.epsilon) * std::sqrt(M_PI / 2.0) / p.detuning;
}

double theta_big_quadrature(const SystemParams& p) {
  if (p.detuning == 0.0) throw Error(ErrorKind::domain, "Theta needs a non-zero detuning");
  const auto [lo, hi] = quadrature_window(p);
  return integrate(
      [&](double t) {
        const auto c = couplings(t, p);
        return (c.eta1 * c.eta1 + c.eta2 * c.eta2) / p.detuning;
      },
      lo, hi);
}

PureState dark_state(double t, const SystemParams& p) {
  const auto c = couplings(t, p);
  const double nrm = std::hypot(c.eta1, c.eta2);
  if (nrm == 0.0) throw Error(ErrorKind::undefined_direction, "dark state undefined with both couplings zero");
  const Basis b = manifold_basis(1);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
  v(static_cast<Eigen::Index>(b.index({0, Level::ground, Level::excited}))) = c.eta1 / nrm;
  v(static_cast<Eigen::Index>(b.index({0, Level::excited, Level::ground}))) = -c.eta2 / nrm;
  return PureState(b, std::move(v));
}

MixingAngles mixing_angles(int n, const SystemParams& p) {
  SystemParams resonant = p;
  resonant.detuning = 0.0;
  MixingAngles out;
  out.phi_n = phi_angle(n, resonant);
  out.tau_c = (p.epsilon > 0.0 && p.delta != 0.0) ? crossing_time(p) : 0.0;
  out.theta_n = (n >= 0 && p.epsilon > 0.0 && p.delta != 0.0) ? theta_angle(n, resonant) : 0.0;
  if (p.detuning != 0.0) out.Theta = theta_big(p);
  return out;
}

}  // namespace cavqed
