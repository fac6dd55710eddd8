#include "seird/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seird/stepper.hpp"

namespace seird {

namespace {

Field axpy(const Field& a, const Field& b, double wa, double wb) {
  Field out(*a.mesh);
  for (int c = 0; c < out.size(); ++c) out[c] = wa * a[c] + wb * b[c];
  return out;
}

double norm_sq(const Field& f, NormKind space) {
  return inner_product(f, f, space);
}

}  // namespace

const Mesh& unit_mesh() {
  static const Mesh m = build_mesh(1, {1, 1, 1}, {1.0, 1.0, 1.0});
  return m;
}

int InterpolantSet::interval_of(double t) const {
  const double s = t / tau;
  int k = static_cast<int>(std::ceil(s - 1e-12));
  return std::clamp(k, 1, segments());
}

Field InterpolantSet::forward_const(double t) const { return samples[interval_of(t)]; }

Field InterpolantSet::backward_const(double t) const { return samples[interval_of(t) - 1]; }

Field InterpolantSet::linear(double t) const {
  const double s = t / tau;
  int j = static_cast<int>(std::floor(s));
  j = std::clamp(j, 0, segments() - 1);
  const double theta = std::clamp(s - j, 0.0, 1.0);
  return axpy(samples[j], samples[j + 1], 1.0 - theta, theta);
}

InterpolantSet build_interpolants(std::vector<Field> samples, double tau) {
  if (samples.size() < 2)
    throw InvariantViolation("build_interpolants: need at least two samples");
  if (!(tau > 0.0)) throw InvariantViolation("build_interpolants: tau must be positive");
  return InterpolantSet{tau, std::move(samples)};
}

InterpolantSet build_interpolants(const std::vector<double>& scalar_samples, double tau) {
  std::vector<Field> fields;
  fields.reserve(scalar_samples.size());
  for (double x : scalar_samples) fields.push_back(Field(unit_mesh(), x));
  return build_interpolants(std::move(fields), tau);
}

double IdentityCheck::gap() const { return equality ? std::abs(lhs - rhs) : lhs - rhs; }

bool IdentityCheck::holds(double rel_tol) const {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (equality) return gap() <= rel_tol * scale;
  return lhs <= rhs + rel_tol * scale;
}

double IdentityReport::max_equality_gap() const {
  double g = 0.0;
  for (const auto& c : checks) {
    if (!c.equality) continue;
    const double scale = std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)});
    g = std::max(g, c.gap() / scale);
  }
  return g;
}

bool IdentityReport::all_hold(double rel_tol) const {
  return std::all_of(checks.begin(), checks.end(),
                     [&](const IdentityCheck& c) { return c.holds(rel_tol); });
}

IdentityReport verify_interpolant_identities(const InterpolantSet& set, NormKind space) {
  const int N = set.segments();
  const double tau = set.tau;
  IdentityReport rep;

  // Sample-side quantities.
  std::vector<double> sample_norm(N + 1);
  for (int k = 0; k <= N; ++k) sample_norm[k] = std::sqrt(norm_sq(set.samples[k], space));
  std::vector<double> incr_norm_sq(N);
  for (int k = 0; k < N; ++k)
    incr_norm_sq[k] = norm_sq(axpy(set.samples[k + 1], set.samples[k], 1.0, -1.0), space);

  // Quadrature-side accumulators from interpolant evaluations. Constants use
  // the midpoint; the linear interpolant uses Simpson, exact at degree two.
  double fwd_sup = 0.0, bwd_sup = 0.0, fwd_l2 = 0.0, bwd_l2 = 0.0;
  double lin_sup = 0.0, lin_l2 = 0.0, deriv_sup = 0.0, deriv_l2 = 0.0;
  double diff_sup = 0.0, diff_l2 = 0.0, diff_updown_l2 = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double t0 = (k - 1) * tau, t1 = k * tau, mid = t0 + 0.5 * tau;
    const Field fc = set.forward_const(mid);
    const Field bc = set.backward_const(mid);
    const Field l0 = set.linear(t0);
    const Field lm = set.linear(mid);
    const Field l1 = set.linear(t1);
    fwd_sup = std::max(fwd_sup, std::sqrt(norm_sq(fc, space)));
    bwd_sup = std::max(bwd_sup, std::sqrt(norm_sq(bc, space)));
    fwd_l2 += tau * norm_sq(fc, space);
    bwd_l2 += tau * norm_sq(bc, space);
    lin_sup = std::max({lin_sup, std::sqrt(norm_sq(l0, space)), std::sqrt(norm_sq(l1, space))});
    lin_l2 += tau / 6.0 * (norm_sq(l0, space) + 4.0 * norm_sq(lm, space) + norm_sq(l1, space));
    const Field dz = axpy(l1, l0, 1.0 / tau, -1.0 / tau);
    deriv_sup = std::max(deriv_sup, std::sqrt(norm_sq(dz, space)));
    deriv_l2 += tau * norm_sq(dz, space);
    // forward constant minus linear: affine in t, zero at the right knot
    const Field d0 = axpy(fc, l0, 1.0, -1.0);
    const Field dm = axpy(fc, lm, 1.0, -1.0);
    diff_sup = std::max(diff_sup, std::sqrt(norm_sq(d0, space)));
    diff_l2 += tau / 6.0 * (norm_sq(d0, space) + 4.0 * norm_sq(dm, space));
    diff_updown_l2 += tau * norm_sq(axpy(fc, bc, 1.0, -1.0), space);
  }

  double fwd_sup_s = 0.0, bwd_sup_s = 0.0, fwd_l2_s = 0.0, bwd_l2_s = 0.0;
  double deriv_sup_s = 0.0, deriv_l2_s = 0.0, incr_sup = 0.0;
  for (int k = 1; k <= N; ++k) fwd_sup_s = std::max(fwd_sup_s, sample_norm[k]);
  for (int k = 0; k < N; ++k) bwd_sup_s = std::max(bwd_sup_s, sample_norm[k]);
  for (int k = 1; k <= N; ++k) fwd_l2_s += tau * sample_norm[k] * sample_norm[k];
  for (int k = 0; k < N; ++k) bwd_l2_s += tau * sample_norm[k] * sample_norm[k];
  for (int k = 0; k < N; ++k) {
    deriv_sup_s = std::max(deriv_sup_s, std::sqrt(incr_norm_sq[k]) / tau);
    deriv_l2_s += incr_norm_sq[k] / tau;
    incr_sup = std::max(incr_sup, std::sqrt(incr_norm_sq[k]));
  }

  rep.checks.push_back({"sup_forward", fwd_sup, fwd_sup_s, true});
  rep.checks.push_back({"sup_backward", bwd_sup, bwd_sup_s, true});
  rep.checks.push_back({"l2_forward", fwd_l2, fwd_l2_s, true});
  rep.checks.push_back({"l2_backward", bwd_l2, bwd_l2_s, true});
  rep.checks.push_back({"l2_derivative", deriv_l2, deriv_l2_s, true});
  rep.checks.push_back({"sup_derivative", deriv_sup, deriv_sup_s, true});
  rep.checks.push_back(
      {"sup_linear", lin_sup, std::max(sample_norm[0], fwd_sup_s), true});
  rep.checks.push_back({"l2_linear_bound", lin_l2,
                        tau * sample_norm[0] * sample_norm[0] + 2.0 * fwd_l2_s, false});
  rep.checks.push_back({"sup_forward_minus_linear", diff_sup, incr_sup, true});
  rep.checks.push_back({"sup_forward_minus_linear_vs_derivative", diff_sup,
                        tau * deriv_sup_s, true});
  double incr_sum = 0.0;
  for (int k = 0; k < N; ++k) incr_sum += incr_norm_sq[k];
  rep.checks.push_back({"l2_forward_minus_linear", diff_l2, tau / 3.0 * incr_sum, true});
  rep.checks.push_back({"l2_forward_minus_linear_vs_updown", diff_l2,
                        diff_updown_l2 / 3.0, true});
  rep.checks.push_back({"l2_forward_minus_linear_vs_derivative", diff_l2,
                        tau * tau / 3.0 * deriv_l2_s, true});

  // Knot subsampling cannot increase the mean-square slope.
  if (N % 2 == 0 && N >= 4) {
    const double tau2 = 2.0 * tau;
    double coarse = 0.0;
    for (int j = 0; j + 2 <= N; j += 2) {
      const Field d = axpy(set.linear((j + 2) * tau), set.linear(j * tau), 1.0 / tau2,
                           -1.0 / tau2);
      coarse += tau2 * norm_sq(d, space);
    }
    rep.checks.push_back({"subsampled_derivative_bound", coarse, deriv_l2_s, false});
  }
  return rep;
}

double l2_time_distance(const InterpolantSet& a, const InterpolantSet& b, NormKind space) {
  const double T = a.horizon();
  if (std::abs(b.horizon() - T) > 1e-9 * std::max(1.0, T))
    throw InvariantViolation("l2_time_distance: horizons differ");

  std::vector<double> knots;
  knots.reserve(a.segments() + b.segments() + 2);
  for (int k = 0; k <= a.segments(); ++k) knots.push_back(k * a.tau);
  for (int k = 0; k <= b.segments(); ++k) knots.push_back(k * b.tau);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [&](double x, double y) {
                            return std::abs(x - y) <= 1e-12 * std::max(1.0, T);
                          }),
              knots.end());

  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const double t0 = knots[j], t1 = knots[j + 1], mid = 0.5 * (t0 + t1);
    const Field d0 = axpy(a.linear(t0), b.linear(t0), 1.0, -1.0);
    const Field dm = axpy(a.linear(mid), b.linear(mid), 1.0, -1.0);
    const Field d1 = axpy(a.linear(t1), b.linear(t1), 1.0, -1.0);
    acc += (t1 - t0) / 6.0 *
           (norm_sq(d0, space) + 4.0 * norm_sq(dm, space) + norm_sq(d1, space));
  }
  return std::sqrt(std::max(0.0, acc));
}

StudyTable convergence_study(const RunConfig& base, const std::vector<int>& step_counts) {
  if (step_counts.empty())
    throw ConfigError(0, "taus", "convergence study needs at least one step count");

  StudyTable table;
  struct Sets {
    InterpolantSet n, s, i, h;
  };
  std::vector<Sets> sets;
  // The interpolant fields reference each run's mesh; keep the meshes alive
  // for the lifetime of the comparison.
  std::vector<std::shared_ptr<const Mesh>> meshes;
  for (int N : step_counts) {
    RunConfig cfg = base;
    cfg.N = N;
    const TauCheck tc = validate_tau(cfg.params, cfg.tau());
    if (!tc.admissible)
      throw ConfigError(0, "taus", "step count " + std::to_string(N) + ": " + tc.reason);
    const Trajectory traj = run_simulation(cfg);
    table.taus.push_back(cfg.tau());
    auto extract = [&](Field State::*member) {
      std::vector<Field> samples;
      samples.reserve(traj.states.size());
      for (const State& st : traj.states) samples.push_back(st.*member);
      return build_interpolants(std::move(samples), cfg.tau());
    };
    meshes.push_back(traj.mesh);
    sets.push_back(Sets{extract(&State::n), extract(&State::s), extract(&State::i),
                        extract(&State::h)});
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 1; j < sets.size(); ++j) {
    StudyRow row;
    row.tau = table.taus[j];
    row.dist_n = l2_time_distance(sets[j - 1].n, sets[j].n, NormKind::H);
    row.dist_s = l2_time_distance(sets[j - 1].s, sets[j].s, NormKind::H);
    row.dist_i = l2_time_distance(sets[j - 1].i, sets[j].i, NormKind::H);
    row.dist_h = l2_time_distance(sets[j - 1].h, sets[j].h, NormKind::H);
    row.dist_combined = std::sqrt(row.dist_n * row.dist_n + row.dist_s * row.dist_s +
                                  row.dist_i * row.dist_i + row.dist_h * row.dist_h);
    row.order_estimate = nan;
    row.cauchy_ratio = nan;
    if (!table.rows.empty()) {
      const StudyRow& prev = table.rows.back();
      const double ratio_tau = table.taus[j - 1] / table.taus[j];
      if (prev.dist_combined > 0.0 && row.dist_combined > 0.0)
        row.order_estimate =
            std::log(prev.dist_combined / row.dist_combined) / std::log(ratio_tau);
      if (prev.dist_combined > 0.0) row.cauchy_ratio = row.dist_combined / prev.dist_combined;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace seird
