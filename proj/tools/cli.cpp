#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "cavqed/analysis.hpp"
#include "cavqed/error.hpp"
#include "cavqed/parallel.hpp"
#include "cavqed/protocols.hpp"
#include "cavqed/spectrum.hpp"

namespace cavqed::cli {
namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::complex<double> parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  in >> re;
  if (in && in.peek() == ',') in >> comma >> im;
  if (!in || !(in >> std::ws).eof())
    throw Error(ErrorKind::domain, "expected 're' or 're,im', got '" + text + "'");
  return {re, im};
}

void write_header(std::ostream& csv, const RunConfig& c, const std::string& extra = {}) {
  const auto& p = c.params;
  csv << "# cavqed " << c.command << " g0_sigma=" << num(p.g0 * p.sigma) << " epsilon=" << num(p.epsilon)
      << " delta=" << num(p.delta) << " detuning_sigma=" << num(p.detuning * p.sigma)
      << " gamma_sigma=" << num(p.gamma * p.sigma) << " window_sigma=" << num(p.t_end);
  if (!c.n.empty()) {
    csv << " n=";
    for (std::size_t i = 0; i < c.n.size(); ++i) csv << (i ? "," : "") << c.n[i];
  }
  if (c.grid) csv << " grid=" << c.grid->to_string();
  csv << extra << '\n';
}

int single_n(const RunConfig& c, int fallback) {
  if (c.n.size() > 1) throw Error(ErrorKind::domain, "this command takes a single --n");
  return c.n.empty() ? fallback : c.n.front();
}

void cmd_spectrum(const RunConfig& c, std::ostream& csv) {
  const int n = single_n(c, 0);
  const auto& p = c.params;
  const Basis basis = Basis::manifold(n + 2);
  const auto points = c.grid->points();
  const double unit = p.g0 > 0.0 ? p.g0 : 1.0;

  std::vector<double> times;
  for (double tau : points) times.push_back(p.time_of_tau(tau));
  std::vector<Eigen::VectorXd> energies(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) energies[k] = diagonalize(times[k], p, basis).energies / unit;

  write_header(csv, c, " units=g0");
  try {
    const auto curve = track_spectrum(p, basis, times);
    for (const auto& x : curve.crossings)
      csv << "# crossing " << (x.type == CrossingEvent::Type::exact ? "exact" : "avoided") << " tau=" << num(x.tau)
          << " gap=" << num(x.gap / unit) << '\n';
  } catch (const RefinementError& e) {
    csv << "# crossings unresolved on this grid (" << e.suggested_points() << " points suggested)\n";
  }

  // Four-level blocks use the E1 = -E_-, E2 = E_-, E3 = -E_+, E4 = E_+
  // labelling, i.e. ascending order 3, 1, 2, 4; smaller blocks stay ascending.
  const std::size_t dim = basis.size();
  std::vector<std::size_t> order(dim);
  for (std::size_t i = 0; i < dim; ++i) order[i] = i;
  if (dim == 4) order = {1, 2, 0, 3};

  csv << "tau";
  for (std::size_t i = 0; i < dim; ++i) csv << ",E" << i + 1;
  csv << '\n';
  for (std::size_t k = 0; k < points.size(); ++k) {
    csv << num(points[k]);
    for (auto i : order) csv << ',' << num(energies[k](static_cast<Eigen::Index>(i)));
    csv << '\n';
  }
}

void cmd_angles(const RunConfig& c, std::ostream& csv) {
  const auto& p = c.params;
  const std::vector<int> ns = c.n.empty() ? std::vector<int>{-1, 0, 1, 10, 100, 1000, 10000} : c.n;
  const bool detuned = p.detuning != 0.0;
  struct Row {
    MixingAngles angles;
    double theta_quad = 0.0;
  };
  auto rows = parallel_map<Row>(ns.size(), c.jobs, [&](std::size_t i) {
    Row r{mixing_angles(ns[i], p)};
    if (detuned) r.theta_quad = theta_big_quadrature(p);
    return r;
  });

  write_header(csv, c);
  csv << "n,phi_n,theta_n,asymptote" << (detuned ? ",Theta,Theta_quadrature" : "") << '\n';
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double asym = ns[i] >= 0 ? 4.0 * p.g0 * p.sigma * std::sqrt(ns[i] * std::numbers::pi) : std::nan("");
    csv << ns[i] << ',' << num(rows[i].angles.phi_n) << ',' << num(rows[i].angles.theta_n) << ',' << num(asym);
    if (detuned) csv << ',' << num(*rows[i].angles.Theta) << ',' << num(rows[i].theta_quad);
    csv << '\n';
  }
}

void cmd_sweep(const RunConfig& c, std::ostream& csv) {
  double SystemParams::*field = nullptr;
  if (c.sweep_kind == "epsilon")
    field = &SystemParams::epsilon;
  else if (c.sweep_kind == "detuning")
    field = &SystemParams::detuning;
  else if (c.sweep_kind == "gamma")
    field = &SystemParams::gamma;
  else
    throw Error(ErrorKind::domain, "sweep kind must be epsilon, detuning or gamma");

  const auto points = c.grid->points();
  auto results = parallel_map<EntangleResult>(points.size(), c.jobs, [&](std::size_t i) {
    SystemParams q = c.params;
    q.*field = points[i] / (field == &SystemParams::epsilon ? 1.0 : q.sigma);
    return entangle_atoms(q);
  });

  write_header(csv, c, " kind=" + c.sweep_kind);
  const std::string column = c.sweep_kind == "epsilon" ? "epsilon" : c.sweep_kind + "_sigma";
  csv << column << ",fidelity,success_probability\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    csv << num(points[i]) << ',' << num(results[i].fidelity) << ',' << num(results[i].success_probability) << '\n';
}

void cmd_populations(const RunConfig& c, std::ostream& csv) {
  const Basis basis = Basis::manifold(2);
  const BareState labels[] = {{0, Level::excited, Level::excited},
                              {1, Level::ground, Level::excited},
                              {2, Level::ground, Level::ground},
                              {1, Level::excited, Level::ground}};
  const auto points = c.grid->points();
  auto rows = parallel_map<std::vector<double>>(points.size(), c.jobs, [&](std::size_t i) {
    SystemParams q = c.params;
    q.detuning = points[i] / q.sigma;
    const auto out = propagate_schrodinger(PureState::bare(basis, labels[3]), q);
    return populations(out, labels);
  });

  write_header(csv, c, " initial=|1;e1g2>");
  csv << "detuning_sigma,p_0_e1e2,p_1_g1e2,p_2_g1g2,p_1_e1g2\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv << num(points[i]);
    for (double v : rows[i]) csv << ',' << num(v);
    csv << '\n';
  }
}

void cmd_teleport(const RunConfig& c, std::ostream& csv, std::ostream& log) {
  const double norm = std::sqrt(std::norm(c.alpha) + std::norm(c.beta));
  if (!(norm > 0.0)) throw Error(ErrorKind::domain, "alpha and beta cannot both vanish");
  const cplx alpha = c.alpha / norm, beta = c.beta / norm;

  auto stages = default_teleport_stages(c.params);
  if (c.stage1_offset != 0.0)
    stages[0].params = calibrate_coupling(0.5 * std::numbers::pi + c.stage1_offset, -1, c.params, 20.0);
  const auto r = teleport(alpha, beta, stages);

  write_header(csv, c,
               " alpha=" + short_num(alpha.real()) + "," + short_num(alpha.imag()) + " beta=" +
                   short_num(beta.real()) + "," + short_num(beta.imag()) + " stage1_offset=" +
                   short_num(c.stage1_offset));
  csv << "stage,g0_sigma,phi_minus1,phi_minus1_mod_2pi,photons_left\n";
  for (std::size_t k = 0; k < 3; ++k) {
    const double phi = r.stages[k].phi_minus1;
    csv << k + 1 << ',' << num(stages[k].params.g0 * stages[k].params.sigma) << ',' << num(phi) << ','
        << num(std::fmod(phi, 2.0 * std::numbers::pi)) << ',' << num(r.stages[k].photons_left) << '\n';
  }
  csv << "# fidelity=" << num(r.fidelity) << " atoms_ground=" << num(r.atoms_ground) << '\n';
  for (const auto& w : r.warnings) csv << "# warning: " << w << '\n';

  log << "fidelity " << num(r.fidelity);
  for (std::size_t k = 0; k < 3; ++k) log << " phi_-1[" << k + 1 << "]=" << num(r.stages[k].phi_minus1);
  log << '\n';
  for (const auto& w : r.warnings) log << "warning: " << w << '\n';
}

void cmd_scatter(const RunConfig& c, std::ostream& csv) {
  const int n = single_n(c, 0);
  const auto& p = c.params;
  const int excitations = n + 2;
  Regime regime;
  if (c.regime == "auto") {
    if (p.detuning != 0.0 && excitations == 1)
      regime = Regime::large_detuning;
    else
      regime = p.epsilon == 1.0 ? Regime::resonant_symmetric : Regime::resonant_asymmetric;
  } else {
    regime = parse_regime(c.regime);
  }

  const auto s = scatter_matrix(p, excitations, {}, c.jobs);
  const auto report = check_input_output(s, mixing_angles(n, p), regime);

  write_header(csv, c, " regime=" + std::string(to_string(regime)));
  csv << "# residual=" << num(report.residual) << " unitarity_error=" << num(s.unitarity_error()) << '\n';
  for (std::size_t i = 0; i < report.column_residuals.size(); ++i)
    if (report.column_residuals[i])
      csv << "# column " << s.basis.label(i).to_string() << " residual=" << num(*report.column_residuals[i]) << '\n';
  csv << "output,input,re,im,predicted_re,predicted_im\n";
  const auto dim = static_cast<Eigen::Index>(s.basis.size());
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      csv << s.basis.label(static_cast<std::size_t>(j)).to_string() << ','
          << s.basis.label(static_cast<std::size_t>(i)).to_string() << ',' << num(s.matrix(j, i).real()) << ','
          << num(s.matrix(j, i).imag()) << ',' << num(report.predicted(j, i).real()) << ','
          << num(report.predicted(j, i).imag()) << '\n';
}

}  // namespace

Grid Grid::parse(const std::string& text) {
  Grid g;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  in >> g.start >> c1 >> g.stop >> c2 >> g.step;
  if (!in || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw Error(ErrorKind::domain, "grid must look like start:stop:step, got '" + text + "'");
  if (!(g.step > 0.0) || !(g.stop >= g.start) || !std::isfinite(g.start) || !std::isfinite(g.stop))
    throw Error(ErrorKind::domain, "grid needs step > 0 and stop >= start");
  return g;
}

std::vector<double> Grid::points() const {
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

std::string Grid::to_string() const { return short_num(start) + ":" + short_num(stop) + ":" + short_num(step); }

void execute(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  config.params.validate();
  if (config.command == "spectrum")
    cmd_spectrum(config, csv);
  else if (config.command == "angles")
    cmd_angles(config, csv);
  else if (config.command == "sweep")
    cmd_sweep(config, csv);
  else if (config.command == "populations")
    cmd_populations(config, csv);
  else if (config.command == "teleport")
    cmd_teleport(config, csv, log);
  else if (config.command == "scatter")
    cmd_scatter(config, csv);
  else
    throw Error(ErrorKind::domain, "unknown command '" + config.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two atoms crossing a cavity with Gaussian couplings: spectra, angles, sweeps and protocols"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; flags on the command line win");

  RunConfig c;
  double g0 = c.params.g0, epsilon = c.params.epsilon, delta = c.params.delta;
  double detuning = 0.0, gamma = 0.0, window = c.params.t_end;
  std::string grid_text, alpha_text, beta_text;

  auto* g0_opt = app.add_option("--g0-sigma", g0, "peak coupling g0 in units of 1/sigma");
  app.add_option("--epsilon", epsilon, "coupling ratio g2/g1");
  app.add_option("--delta", delta, "dimensionless half delay between the atoms");
  app.add_option("--detuning-sigma", detuning, "detuning in units of 1/sigma");
  app.add_option("--gamma-sigma", gamma, "cavity decay rate in units of 1/sigma");
  app.add_option("--n", c.n, "photon index n (comma separated list for angles)")->delimiter(',');
  auto* window_opt = app.add_option("--window-sigma", window, "integrate over [-w, w] sigma");
  app.add_option("--grid", grid_text, "start:stop:step of the swept quantity");
  app.add_option("--jobs", c.jobs, "worker threads, 0 = all processors");
  app.add_option("--out", c.out, "output file (default stdout)");

  app.add_subcommand("spectrum", "adiabatic energies vs tau (units of g0)");
  app.add_subcommand("angles", "mixing angles phi_n, theta_n and the large-n asymptote");
  auto* sweep = app.add_subcommand("sweep", "entangling fidelity vs epsilon, detuning or gamma");
  sweep->add_option("--kind", c.sweep_kind, "epsilon | detuning | gamma")
      ->check(CLI::IsMember({"epsilon", "detuning", "gamma"}));
  app.add_subcommand("populations", "final populations from |1;e1g2> vs detuning (g0 sigma = 50)");
  auto* tele = app.add_subcommand("teleport", "three-cavity teleportation of alpha|0> + beta|1>");
  tele->add_option("--alpha", alpha_text, "re or re,im");
  tele->add_option("--beta", beta_text, "re or re,im");
  tele->add_option("--stage1-offset", c.stage1_offset, "added to the stage-1 phi_-1 target (rad)");
  auto* scatter = app.add_subcommand("scatter", "transit matrix on one manifold against the adiabatic table");
  scatter->add_option("--regime", c.regime, "auto | resonant-symmetric | resonant-asymmetric | large-detuning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::bad_arguments;
  }

  c.command = app.get_subcommands().front()->get_name();
  c.g0_given = g0_opt->count() > 0;
  c.window_given = window_opt->count() > 0;

  try {
    if (c.command == "populations") {
      if (!c.g0_given) g0 = 50.0;
      if (!c.window_given) window = 6.0;
    }
    c.params.g0 = g0;
    c.params.epsilon = epsilon;
    c.params.delta = delta;
    c.params.detuning = detuning;
    c.params.gamma = gamma;
    c.params.t_start = -window;
    c.params.t_end = window;
    if (!alpha_text.empty()) c.alpha = parse_complex(alpha_text);
    if (!beta_text.empty()) c.beta = parse_complex(beta_text);
    if (!grid_text.empty()) {
      c.grid = Grid::parse(grid_text);
    } else if (c.command == "spectrum") {
      c.grid = Grid{-3.0, 3.0, 0.01};
    } else if (c.command == "sweep") {
      if (c.sweep_kind == "epsilon") c.grid = Grid{0.9, 1.1, 0.002};
      if (c.sweep_kind == "detuning") c.grid = Grid{0.0, 10.0, 0.1};
      if (c.sweep_kind == "gamma") c.grid = Grid{0.0, 0.2, 0.01};
    } else if (c.command == "populations") {
      c.grid = Grid{0.0, 100.0, 1.0};
    }
    c.params.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::bad_arguments;
  }

  try {
    std::ostringstream csv;
    execute(c, csv, c.out.empty() ? err : out);
    if (c.out.empty()) {
      out << csv.str();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      file << csv.str();
      file.close();
      if (!file) throw Error(ErrorKind::io, "cannot write '" + c.out + "'");
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.kind() == ErrorKind::io) return ExitCode::io_failure;
    if (e.kind() == ErrorKind::domain) return ExitCode::bad_arguments;
    return ExitCode::numerical_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::numerical_failure;
  }
  return ExitCode::ok;
}

}  // namespace cavqed::cli
