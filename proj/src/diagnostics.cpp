#include "seird/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seird {

namespace {

EnergyEntry accumulate_energy(const Trajectory& traj, Field State::*member,
                              const DiscreteOperator& unit_op) {
  EnergyEntry e;
  const double tau = traj.grid.tau();
  const Mesh& mesh = *traj.mesh;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Field& z = traj.states[k].*member;
    e.max_h_sq = std::max(e.max_h_sq, inner_product(z, z, NormKind::H));
    e.tau_sum_v_sq += tau * inner_product(z, z, NormKind::V);
    if (k + 1 < traj.states.size()) {
      const Field& z1 = traj.states[k + 1].*member;
      Field incr(mesh);
      for (int c = 0; c < mesh.cell_count(); ++c) incr[c] = z1[c] - z[c];
      e.incr_sum_h_sq += inner_product(incr, incr, NormKind::H);
      for (int c = 0; c < mesh.cell_count(); ++c) incr[c] /= tau;
      const double dual = dual_norm(incr, unit_op);
      e.dual_deriv_sq += tau * dual * dual;
    }
  }
  return e;
}

}  // namespace

EnergyReport monitor_energy(const Trajectory& traj) {
  const Mesh& mesh = *traj.mesh;
  const DiscreteOperator unit_op =
      assemble_operator(mesh, Field(mesh, 1.0), Field(mesh, 1.0));
  EnergyReport rep;
  rep.n = accumulate_energy(traj, &State::n, unit_op);
  rep.s = accumulate_energy(traj, &State::s, unit_op);
  rep.i = accumulate_energy(traj, &State::i, unit_op);
  rep.h = accumulate_energy(traj, &State::h, unit_op);
  return rep;
}

std::vector<BoundViolation> verify_bounds(const Trajectory& traj,
                                          const BoundsLedger& ledger) {
  std::vector<BoundViolation> out;
  for (const State& st : traj.states) {
    auto v = state_violations(st, ledger, traj.tol);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<double> population_balance_residuals(const Trajectory& traj) {
  const Mesh& mesh = *traj.mesh;
  const double tau = traj.grid.tau();
  const ModelParams& p = traj.params;
  std::vector<double> out;
  out.reserve(traj.states.size() - 1);
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Field& n0 = traj.states[k].n;
    const Field& i0 = traj.states[k].i;
    const Field& n1 = traj.states[k + 1].n;
    double resid = 0.0, scale = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
      resid += (n1[c] - n0[c]) + tau * p.phi_d * i0[c] * n1[c] -
               tau * (p.alpha - p.mu) * n1[c];
      scale += n0[c];
    }
    out.push_back(std::abs(resid) / std::max(scale, 1e-300));
  }
  return out;
}

ProbeResult stability_probe(const RunConfig& config, double delta) {
  if (config.nonlinearity.kappa_kind != Nonlinearity::KappaKind::constant)
    throw InvariantViolation("stability_probe: requires a constant diffusivity");
  ProbeResult res;
  if (delta == 0.0) return res;
  if (!(delta > 0.0)) throw InvariantViolation("stability_probe: delta must be >= 0");

  auto mesh = std::make_shared<const Mesh>(build_mesh_from(config.mesh));
  Field n0 = build_initial_field(*mesh, config.init_n);
  Field s0 = build_initial_field(*mesh, config.init_s);
  Field i0 = build_initial_field(*mesh, config.init_i);
  Field h0 = build_initial_field(*mesh, config.init_h);

  // Smooth bump, peak 1 at the domain center.
  Field bump(*mesh);
  for (int c = 0; c < mesh->cell_count(); ++c) {
    double r2 = 0.0, w = 1.0;
    for (int a = 0; a < mesh->dim(); ++a) {
      const double d = mesh->center(c, a) - 0.5 * mesh->lengths()[a];
      r2 += d * d;
      w = std::min(w, mesh->lengths()[a] / 8.0);
    }
    bump[c] = std::exp(-r2 / (2.0 * w * w));
  }

  Field n1 = n0, s1 = s0, i1 = i0, h1 = h0;
  // Signs keep the perturbed data admissible for data at the constraint
  // boundary: s moves down (preserving h >= s), the others move up.
  if (config.probe_target == "n")
    for (int c = 0; c < mesh->cell_count(); ++c) n1[c] += delta * bump[c];
  else if (config.probe_target == "s")
    for (int c = 0; c < mesh->cell_count(); ++c) s1[c] -= delta * bump[c];
  else if (config.probe_target == "i")
    for (int c = 0; c < mesh->cell_count(); ++c) i1[c] += delta * bump[c];
  else
    for (int c = 0; c < mesh->cell_count(); ++c) h1[c] += delta * bump[c];

  if (!(field_min(n1) > 0.0) || field_min(s1) < 0.0 || field_min(i1) < 0.0)
    throw InvariantViolation("stability_probe: perturbed data inadmissible");
  for (int c = 0; c < mesh->cell_count(); ++c)
    if (h1[c] < s1[c])
      throw InvariantViolation("stability_probe: perturbed data break h0 >= s0");

  const Trajectory base = run_simulation_with_fields(config, mesh, n0, s0, i0, h0);
  const Trajectory pert = run_simulation_with_fields(config, mesh, n1, s1, i1, h1);

  auto combined_diff = [&](const State& a, const State& b) {
    double acc = 0.0;
    const Field* lhs[] = {&a.n, &a.s, &a.i, &a.h};
    const Field* rhs[] = {&b.n, &b.s, &b.i, &b.h};
    for (int q = 0; q < 4; ++q) {
      Field d(*mesh);
      for (int c = 0; c < mesh->cell_count(); ++c) d[c] = (*lhs[q])[c] - (*rhs[q])[c];
      acc += inner_product(d, d, NormKind::H);
    }
    return std::sqrt(acc);
  };

  res.initial_diff = combined_diff(base.states[0], pert.states[0]);
  for (std::size_t k = 0; k < base.states.size(); ++k) {
    const double f = combined_diff(base.states[k], pert.states[k]) / res.initial_diff;
    res.step_factors.push_back(f);
    res.factor = std::max(res.factor, f);
  }
  const double cap = std::exp(config.probe_gronwall_c * config.T);
  if (!(res.factor <= cap))
    throw InvariantViolation("stability_probe: amplification " + std::to_string(res.factor) +
                             " exceeds exp(C T) = " + std::to_string(cap));
  return res;
}

}  // namespace seird
