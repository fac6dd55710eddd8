#pragma once

#include <vector>

#include "seird/stepper.hpp"

namespace seird {

// The three first-estimate quantities plus the dual-norm derivative proxy
// for one unknown, accumulated over the whole trajectory.
struct EnergyEntry {
  double max_h_sq = 0.0;       // max_k ||z_k||_H^2
  double tau_sum_v_sq = 0.0;   // tau sum_{k=0..N} ||z_k||_V^2
  double incr_sum_h_sq = 0.0;  // sum_k ||z_{k+1} - z_k||_H^2
  double dual_deriv_sq = 0.0;  // tau sum_k ||(z_{k+1} - z_k)/tau||_{V*}^2

  // The bounded first-estimate aggregate; its constituents trade off against
  // each other under refinement while the sum stays put.
  double first_estimate_total() const { return max_h_sq + tau_sum_v_sq + incr_sum_h_sq; }
};

struct EnergyReport {
  EnergyEntry n, s, i, h;

  const EnergyEntry& by_index(int idx) const {
    switch (idx) {
      case 0: return n;
      case 1: return s;
      case 2: return i;
      default: return h;
    }
  }
};

EnergyReport monitor_energy(const Trajectory& trajectory);

// Checks every state of the trajectory against the ledger with slack 10*tol;
// empty result means pass.
std::vector<BoundViolation> verify_bounds(const Trajectory& trajectory,
                                          const BoundsLedger& ledger);

// Per-step relative residual of the volume-weighted population balance
//   sum (n_next - n) + tau phi_d sum i n_next = tau (alpha - mu) sum n_next,
// the zero-flux conservation identity of the population equation tested
// against the constant function.
std::vector<double> population_balance_residuals(const Trajectory& trajectory);

struct ProbeResult {
  double factor = 0.0;        // max_k step_factors[k]
  double initial_diff = 0.0;  // H-distance of the perturbed initial data
  std::vector<double> step_factors;
};

// Continuous-dependence probe for constant diffusivity: runs the scheme from
// the configured data and from data perturbed by delta times a smooth bump in
// the configured target unknown, then reports the worst-case amplification of
// the combined H-distance. Aborts when the factor exceeds exp(C T) for the
// config-declared C, or when the perturbed data are inadmissible.
ProbeResult stability_probe(const RunConfig& config, double delta);

}  // namespace seird
