#pragma once

// Time propagation over the window [t_start, t_end] of SystemParams.
//
// The production path is an embedded Dormand-Prince 5(4) integrator with
// adaptive steps. The oracle path freezes H at each step midpoint and applies
// the exact exponential of the (Schroedinger or Liouville) generator; it exists
// to cross-check the adaptive path and is far slower.

#include <cstddef>

#include "cavqed/model.hpp"

namespace cavqed {

struct PropagationConfig {
  enum class Method { adaptive, oracle };

  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double initial_step = 0.01;  // units of sigma
  double max_step = 0.1;       // units of sigma
  Method method = Method::adaptive;
  double oracle_step = 1.0 / 200.0;  // units of sigma, used by Method::oracle

  void validate() const;
};

struct PropagationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double norm_error = 0.0;      // |norm - 1| before the final renormalisation
  double trace_error = 0.0;     // |tr rho - 1| at the end (Lindblad)
  double max_clipped_population = 0.0;  // largest population beyond the photon cap
};

/// i d psi/dt = H(t) psi over the window. Works on manifold and full bases.
/// Throws ErrorKind::wrong_propagator if p.gamma > 0 and ErrorKind::stiffness
/// on step-size underflow.
PureState propagate_schrodinger(const PureState& psi0, const SystemParams& p,
                                const PropagationConfig& config = {}, PropagationStats* stats = nullptr);

/// d rho/dt = -i[H, rho] - (gamma/2)(a+a rho + rho a+a - 2 a rho a+) on a full
/// basis. Re-symmetrises rho after every accepted step; never rescales the
/// trace. Throws ErrorKind::truncation if more than 1e-6 of the population
/// sits in states with more excitations than n_max while the couplings are
/// active (those are the states whose a+ action is clipped).
DensityMatrix propagate_lindblad(const DensityMatrix& rho0, const SystemParams& p,
                                 const PropagationConfig& config = {}, PropagationStats* stats = nullptr);

/// Piecewise-constant midpoint-exponential propagation with a fixed step
/// (must not exceed sigma / 200).
PureState oracle_propagate(const PureState& psi0, const SystemParams& p, double step);
DensityMatrix oracle_propagate(const DensityMatrix& rho0, const SystemParams& p, double step);

/// Single oracle step from t to t + dt (dt may be zero).
PureState oracle_step(const PureState& psi, const SystemParams& p, double t, double dt);

/// Multiply every amplitude whose `atom` is excited by exp(i chi).
PureState apply_phase_gate(const PureState& psi, int atom, double chi);

}  // namespace cavqed
