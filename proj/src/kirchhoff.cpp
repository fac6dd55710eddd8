#include "seird/kirchhoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seird {

namespace {
double pos_part(double x) { return x > 0.0 ? x : 0.0; }
}  // namespace

KirchhoffMap make_kirchhoff_map(const TruncatedNonlinearity& tnl) {
  KirchhoffMap m;
  m.n_lo_ = tnl.ledger.n_low;
  m.n_up_ = tnl.ledger.n_up;
  tnl.base.kappa_affine(m.a_, m.b_);
  m.k_lo_ = m.a_ * m.n_lo_ + m.b_;
  m.k_hi_ = m.a_ * m.n_up_ + m.b_;
  if (!(m.k_lo_ > 0.0) || !(m.k_hi_ > 0.0))
    throw InvariantViolation("kirchhoff: truncated diffusivity must stay positive");
  m.K_lo_ = m.k_lo_ * m.n_lo_;
  m.K_up_ = m.K_lo_ + 0.5 * m.a_ * (m.n_up_ * m.n_up_ - m.n_lo_ * m.n_lo_) +
            m.b_ * (m.n_up_ - m.n_lo_);
  m.IK_lo_ = 0.5 * m.k_lo_ * m.n_lo_ * m.n_lo_;
  m.IK_up_ = m.integral(m.n_up_);
  return m;
}

double KirchhoffMap::eval(double y) const {
  if (y <= n_lo_) return k_lo_ * y;
  if (y >= n_up_) return K_up_ + k_hi_ * (y - n_up_);
  return K_lo_ + 0.5 * a_ * (y * y - n_lo_ * n_lo_) + b_ * (y - n_lo_);
}

double KirchhoffMap::invert(double u) const {
  if (u <= K_lo_) return u / k_lo_;
  if (u >= K_up_) return n_up_ + (u - K_up_) / k_hi_;
  const double r = u - K_lo_;
  if (a_ == 0.0) return n_lo_ + r / b_;
  // (a/2) w^2 + k_lo w = r with w = y - n_lo; the conjugate root form keeps
  // the subtraction cancellation-free.
  const double w = 2.0 * r / (k_lo_ + std::sqrt(k_lo_ * k_lo_ + 2.0 * a_ * r));
  return n_lo_ + w;
}

double KirchhoffMap::diffusivity(double y) const {
  const double c = std::max(n_lo_, std::min(y, n_up_));
  return a_ * c + b_;
}

double KirchhoffMap::inverse_derivative(double u) const {
  return 1.0 / diffusivity(invert(u));
}

double KirchhoffMap::integral(double y) const {
  if (y <= n_lo_) return 0.5 * k_lo_ * y * y;
  if (y <= n_up_) {
    const double d = y - n_lo_;
    return IK_lo_ + K_lo_ * d +
           0.5 * a_ * ((y * y * y - n_lo_ * n_lo_ * n_lo_) / 3.0 - n_lo_ * n_lo_ * d) +
           b_ * (0.5 * (y * y - n_lo_ * n_lo_) - n_lo_ * d);
  }
  const double d = y - n_up_;
  return IK_up_ + K_up_ * d + 0.5 * k_hi_ * d * d;
}

double KirchhoffMap::convex_potential(double u) const {
  const double y = invert(u);
  return u * y - integral(y);
}

double population_step_objective(const Mesh& mesh, const DiscreteOperator& stiffness,
                                 const Field& lam, const Field& n_prev,
                                 const KirchhoffMap& map, double tau, const Field& u) {
  std::vector<double> su;
  stiffness.apply(u.v, su);
  const double vol = mesh.cell_volume();
  double quad = 0.0, pot = 0.0, lin = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    quad += u[c] * su[c];
    pot += lam[c] * map.convex_potential(u[c]);
    lin += n_prev[c] * u[c];
  }
  return 0.5 * quad + pot * vol - lin * vol / tau;
}

Field solve_n_step(const Mesh& mesh, const Field& n_prev, const Field& i_prev,
                   const ModelParams& params, const KirchhoffMap& map, double tau,
                   double tol, NStepReport* report) {
  const int n = mesh.cell_count();
  const double vol = mesh.cell_volume();
  const TauCheck tc = validate_tau(params, tau);
  if (!tc.admissible) throw InvariantViolation("solve_n_step: " + tc.reason);

  Field lam(mesh);
  double i_sup = 0.0;
  for (int c = 0; c < n; ++c) {
    if (i_prev[c] < -bound_slack(tol, 1.0))
      throw InvariantViolation("solve_n_step: negative infected input");
    if (n_prev[c] < -bound_slack(tol, 1.0))
      throw InvariantViolation("solve_n_step: negative population input");
    i_sup = std::max(i_sup, i_prev[c]);
    lam[c] = 1.0 / tau + params.phi_d * i_prev[c] - params.alpha + params.mu;
    if (!(lam[c] > 0.0))
      throw InvariantViolation("solve_n_step: reaction multiplier not positive");
  }

  const DiscreteOperator stiffness = assemble_stiffness(mesh, Field(mesh, 1.0));
  DiscreteOperator jac = stiffness;

  // tol bounds the admitted terminal residual; solving tighter costs one
  // extra quadratic step and buys slack for the bound assertions downstream.
  const double n_prev_norm = compute_norm(n_prev, NormKind::H);
  const double target = std::min(tol, 1e-12) * n_prev_norm / tau;
  const double cg_tol = std::max(1e-14, 0.01 * std::min(tol, 1e-12));

  Field u(mesh);
  for (int c = 0; c < n; ++c) u[c] = map.eval(n_prev[c]);

  NStepReport rep;
  std::vector<double> su;
  Field resid(mesh);
  auto residual_norm = [&]() {
    stiffness.apply(u.v, su);
    for (int c = 0; c < n; ++c)
      resid[c] = lam[c] * map.invert(u[c]) + su[c] / vol - n_prev[c] / tau;
    return compute_norm(resid, NormKind::H);
  };

  double rn = residual_norm();
  rep.residual_history.push_back(rn);
  double obj = population_step_objective(mesh, stiffness, lam, n_prev, map, tau, u);
  rep.objective_history.push_back(obj);

  const int max_newton = 100;
  while (rn > target) {
    if (rep.newton_iterations >= max_newton)
      throw SolverError("solve_n_step: Newton stalled at residual " + std::to_string(rn),
                        rep.newton_iterations, rn);
    for (int c = 0; c < n; ++c)
      jac.val[jac.diag_index[c]] = stiffness.val[stiffness.diag_index[c]] +
                                   lam[c] * map.inverse_derivative(u[c]) * vol;
    Field rhs(mesh);
    for (int c = 0; c < n; ++c) rhs[c] = -resid[c] * vol;
    auto [delta, cg] = solve_spd(jac, mesh, rhs, cg_tol, 0);
    rep.total_cg_iterations += cg.iterations;

    // grad J . delta = (resid * vol) . delta; Armijo backtracking on J. The
    // rounding guard keeps full steps acceptable once the predicted decrease
    // drops below the resolution of the objective itself.
    double slope = 0.0;
    for (int c = 0; c < n; ++c) slope += resid[c] * vol * delta[c];
    const double obj_eps =
        16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(obj));
    double step = 1.0;
    Field trial(mesh);
    bool accepted = false;
    for (int back = 0; back < 40; ++back) {
      for (int c = 0; c < n; ++c) trial[c] = u[c] + step * delta[c];
      const double trial_obj =
          population_step_objective(mesh, stiffness, lam, n_prev, map, tau, trial);
      if (trial_obj <= obj + 1e-4 * step * slope + obj_eps) {
        u = trial;
        obj = trial_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw SolverError("solve_n_step: line search failed after damped retries",
                        rep.newton_iterations, rn);
    ++rep.newton_iterations;
    rn = residual_norm();
    rep.residual_history.push_back(rn);
    rep.objective_history.push_back(obj);
  }

  Field out(mesh);
  for (int c = 0; c < n; ++c) out[c] = map.invert(u[c]);

  const double sup_cap =
      field_max(n_prev) / (1.0 - tau * pos_part(params.alpha - params.mu));
  const double inf_cap =
      field_min(n_prev) / (1.0 + tau * (params.phi_d * i_sup + pos_part(params.mu - params.alpha)));
  if (field_min(out) < -bound_slack(tol, 1.0) ||
      field_max(out) > sup_cap + bound_slack(tol, sup_cap) ||
      field_min(out) < inf_cap - bound_slack(tol, inf_cap))
    throw InvariantViolation("solve_n_step: per-step population bounds violated: range [" +
                             std::to_string(field_min(out)) + ", " +
                             std::to_string(field_max(out)) + "], admitted [" +
                             std::to_string(inf_cap) + ", " + std::to_string(sup_cap) + "]");
  if (report) *report = std::move(rep);
  return out;
}

}  // namespace seird
