#include "seird/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seird {

Field mollify_initial(const Mesh& mesh, const Field& u, double tau, double tol) {
  if (!(tau > 0.0 && tau < 1.0))
    throw InvariantViolation("mollify_initial: tau must lie in (0,1)");
  if (!field_finite(u)) throw InvariantViolation("mollify_initial: non-finite input");

  const DiscreteOperator op = assemble_operator(mesh, Field(mesh, tau), Field(mesh, 1.0));
  Field rhs(mesh);
  for (int c = 0; c < mesh.cell_count(); ++c) rhs[c] = u[c] * mesh.cell_volume();
  auto [smooth, rep] = solve_spd(op, mesh, rhs, tol, 0);
  (void)rep;

  const double lo = field_min(u), hi = field_max(u);
  if (field_min(smooth) < lo - bound_slack(tol, lo) ||
      field_max(smooth) > hi + bound_slack(tol, hi))
    throw InvariantViolation("mollify_initial: range containment failed");
  const double norm_in = compute_norm(u, NormKind::H);
  if (compute_norm(smooth, NormKind::H) > norm_in + bound_slack(tol, norm_in))
    throw InvariantViolation("mollify_initial: H-norm expanded");
  return std::move(smooth);
}

std::vector<BoundViolation> state_violations(const State& state, const BoundsLedger& ledger,
                                             double tol) {
  std::vector<BoundViolation> out;
  const int n = state.n.size();
  auto check_low = [&](const Field& f, double bound, const char* what) {
    for (int c = 0; c < n; ++c)
      if (f[c] < bound - bound_slack(tol, bound))
        out.push_back({state.k, c, what, f[c], bound});
  };
  auto check_up = [&](const Field& f, double bound, const char* what) {
    for (int c = 0; c < n; ++c)
      if (f[c] > bound + bound_slack(tol, bound))
        out.push_back({state.k, c, what, f[c], bound});
  };
  check_low(state.n, ledger.n_low, "n lower bound");
  check_up(state.n, ledger.n_up, "n upper bound");
  check_low(state.s, 0.0, "s sign");
  check_up(state.s, ledger.s_up, "s upper bound");
  check_low(state.i, 0.0, "i sign");
  check_up(state.i, ledger.i_up, "i upper bound");
  check_up(state.h, ledger.h_up, "h upper bound");
  for (int c = 0; c < n; ++c)
    if (state.h[c] < state.s[c] - bound_slack(tol, state.s[c]))
      out.push_back({state.k, c, "ordering h >= s", state.h[c] - state.s[c], 0.0});
  return out;
}

State advance_step(const State& state, const ModelParams& params, const KirchhoffMap& map,
                   const TruncatedNonlinearity& tnl, double tau, double tol,
                   StepReport* report) {
  const Mesh& mesh = *state.n.mesh;
  const int n = mesh.cell_count();
  StepReport rep;

  State next;
  next.k = state.k + 1;
  next.t = state.t + tau;
  next.n = solve_n_step(mesh, state.n, state.i, params, map, tau, tol, &rep.population);

  Field a(mesh);
  for (int c = 0; c < n; ++c) a[c] = tnl.diffusivity(next.n[c]);

  // susceptible: contact losses lag the previous level in the coefficient
  Field b(mesh), f(mesh);
  for (int c = 0; c < n; ++c) {
    const double contact = tnl.contact_attenuation(next.n[c]) *
                           (params.beta_i * state.i[c] +
                            params.beta_e * (state.h[c] - state.s[c]));
    b[c] = 1.0 / tau + contact + params.mu;
    f[c] = state.s[c] / tau + params.alpha * next.n[c];
  }
  next.s = solve_reaction_diffusion(mesh, a, b, f, tol, &rep.s_solve);

  // h = s + e: uniform decay, sourced by births and the susceptible inflow
  const double hd = params.h_decay();
  for (int c = 0; c < n; ++c) {
    b[c] = 1.0 / tau + params.mu + hd;
    f[c] = state.h[c] / tau + params.alpha * next.n[c] + hd * next.s[c];
  }
  next.h = solve_reaction_diffusion(mesh, a, b, f, tol, &rep.h_solve);

  // exposed component solved directly: its source is nonnegative, which is
  // what forces h_next >= s_next; compare against the difference
  for (int c = 0; c < n; ++c) {
    const double e_prev = state.h[c] - state.s[c];
    f[c] = e_prev / tau + tnl.contact_attenuation(next.n[c]) * next.s[c] *
                              (params.beta_i * state.i[c] + params.beta_e * e_prev);
  }
  const Field e_next = solve_reaction_diffusion(mesh, a, b, f, tol, &rep.e_check);
  double gap = 0.0;
  for (int c = 0; c < n; ++c)
    gap = std::max(gap, std::abs((next.h[c] - next.s[c]) - e_next[c]));
  rep.ordering_gap = gap;
  const double e_scale = std::max(1.0, field_max(e_next));
  if (gap > bound_slack(tol, e_scale))
    throw InvariantViolation("advance_step: h - s deviates from the exposed solve by " +
                             std::to_string(gap));

  // infected: sourced by sigma * (h_next - s_next)
  for (int c = 0; c < n; ++c) {
    b[c] = 1.0 / tau + params.phi_d * next.n[c] + params.phi_r + params.mu;
    f[c] = state.i[c] / tau + params.sigma * (next.h[c] - next.s[c]);
  }
  next.i = solve_reaction_diffusion(mesh, a, b, f, tol, &rep.i_solve);

  const auto bad = state_violations(next, tnl.ledger, tol);
  if (!bad.empty()) {
    const auto& v = bad.front();
    throw InvariantViolation("advance_step: state invariant failed at step " +
                             std::to_string(v.step) + ", cell " + std::to_string(v.cell) +
                             ": " + v.quantity + " = " + std::to_string(v.value) +
                             " vs bound " + std::to_string(v.bound) + " (" +
                             std::to_string(bad.size()) + " violations)");
  }
  if (report) *report = std::move(rep);
  return next;
}

Compartments reconstruct_compartments(const State& state, double tol) {
  const Mesh& mesh = *state.n.mesh;
  Compartments out;
  out.s = state.s;
  out.e = Field(mesh);
  out.r = Field(mesh);
  for (int c = 0; c < mesh.cell_count(); ++c) {
    out.e[c] = state.h[c] - state.s[c];
    out.r[c] = state.n[c] - state.h[c] - state.i[c];
  }
  out.min_r = field_min(out.r);
  out.negative_r = out.min_r < -bound_slack(tol, field_max(state.n));
  return out;
}

std::vector<Field> integrate_deceased(const Trajectory& trajectory, double phi_d,
                                      const Field* d0) {
  const Mesh& mesh = *trajectory.mesh;
  const double tau = trajectory.grid.tau();
  std::vector<Field> d;
  d.reserve(trajectory.states.size());
  d.push_back(d0 ? *d0 : Field(mesh, 0.0));
  for (std::size_t k = 1; k < trajectory.states.size(); ++k) {
    Field next = d.back();
    const State& st = trajectory.states[k];
    for (int c = 0; c < mesh.cell_count(); ++c)
      next[c] += tau * phi_d * st.i[c] * st.n[c];
    d.push_back(std::move(next));
  }
  return d;
}

Trajectory run_simulation(const RunConfig& config) {
  validate_config(config);
  auto mesh = std::make_shared<const Mesh>(build_mesh_from(config.mesh));
  Field n0 = build_initial_field(*mesh, config.init_n);
  Field s0 = build_initial_field(*mesh, config.init_s);
  Field i0 = build_initial_field(*mesh, config.init_i);
  Field h0 = build_initial_field(*mesh, config.init_h);
  return run_simulation_with_fields(config, std::move(mesh), std::move(n0), std::move(s0),
                                    std::move(i0), std::move(h0));
}

Trajectory run_simulation_with_fields(const RunConfig& config,
                                      std::shared_ptr<const Mesh> mesh_ptr, Field n0,
                                      Field s0, Field i0, Field h0) {
  Trajectory traj;
  traj.mesh = std::move(mesh_ptr);
  const Mesh& mesh = *traj.mesh;
  traj.grid = TimeGrid{config.T, config.N};
  traj.params = config.params;
  traj.tol = config.tol;
  const double tau = traj.grid.tau();
  const TauCheck tc = validate_tau(config.params, tau);
  if (!tc.admissible) throw ConfigError(0, "time.N", "tau inadmissible: " + tc.reason);

  // The a-priori constants come from the grid extrema of the raw data; the
  // mollifier cannot enlarge ranges, so they cover the smoothed data too.
  const BoundsLedger ledger =
      compute_bounds(config.params, config.nonlinearity, config.T, field_max(n0),
                     field_max(s0), field_max(h0), field_max(i0), field_min(n0));
  traj.tnl = truncate_nonlinearity(config.nonlinearity, ledger);
  const KirchhoffMap map = make_kirchhoff_map(traj.tnl);

  if (config.mollify) {
    // h is smoothed through s and e = h - s separately, which keeps
    // h0 >= s0 intact (each smoothing preserves nonnegativity).
    Field e0(mesh);
    for (int c = 0; c < mesh.cell_count(); ++c) e0[c] = h0[c] - s0[c];
    n0 = mollify_initial(mesh, n0, tau, config.tol);
    i0 = mollify_initial(mesh, i0, tau, config.tol);
    s0 = mollify_initial(mesh, s0, tau, config.tol);
    const Field e0s = mollify_initial(mesh, e0, tau, config.tol);
    for (int c = 0; c < mesh.cell_count(); ++c) h0[c] = s0[c] + e0s[c];
  }

  State init;
  init.k = 0;
  init.t = 0.0;
  init.n = std::move(n0);
  init.s = std::move(s0);
  init.i = std::move(i0);
  init.h = std::move(h0);
  traj.states.push_back(std::move(init));

  auto partial = [&]() { return std::make_shared<Trajectory>(traj); };
  const auto bad0 = state_violations(traj.states.front(), ledger, config.tol);
  if (!bad0.empty())
    throw SimulationError("initial state violates the data hypotheses", 0, partial(),
                          std::make_exception_ptr(InvariantViolation(bad0.front().quantity)));

  for (int k = 0; k < config.N; ++k) {
    try {
      StepReport rep;
      State next =
          advance_step(traj.states.back(), config.params, map, traj.tnl, tau, config.tol, &rep);
      traj.states.push_back(std::move(next));
      traj.reports.push_back(std::move(rep));
    } catch (const std::exception& e) {
      throw SimulationError("step " + std::to_string(k + 1) + " failed: " + e.what(), k + 1,
                            partial(), std::current_exception());
    }
  }

  const Field d0(mesh, config.init_d);
  traj.deceased = integrate_deceased(traj, config.params.phi_d, &d0);
  return traj;
}

}  // namespace seird
