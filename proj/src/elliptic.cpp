#include "seird/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seird {

std::pair<Field, SolveReport> solve_spd(const DiscreteOperator& op, const Mesh& mesh,
                                        const Field& rhs, double tol, int max_iter) {
  const int n = op.n;
  if (max_iter <= 0) max_iter = 10 * n;
  if (!(tol > 0.0)) throw SolverError("solve_spd: tolerance must be positive");

  Field u(mesh, 0.0);
  SolveReport rep;

  double rhs_norm2 = 0.0;
  for (int c = 0; c < n; ++c) rhs_norm2 += rhs[c] * rhs[c];
  const double rhs_norm = std::sqrt(rhs_norm2);
  if (rhs_norm == 0.0) return {std::move(u), rep};
  const double stop = tol * rhs_norm;

  std::vector<double> r = rhs.v;
  std::vector<double> z(n), p(n), ap(n);
  for (int c = 0; c < n; ++c) z[c] = r[c] / op.diagonal(c);
  p = z;
  double rz = 0.0;
  for (int c = 0; c < n; ++c) rz += r[c] * z[c];

  double rnorm = rhs_norm;
  int it = 0;
  while (rnorm > stop) {
    if (it >= max_iter)
      throw SolverError("solve_spd: no convergence in " + std::to_string(max_iter) +
                            " iterations, residual " + std::to_string(rnorm / rhs_norm),
                        it, rnorm / rhs_norm);
    op.apply(p, ap);
    double pap = 0.0;
    for (int c = 0; c < n; ++c) pap += p[c] * ap[c];
    const double alpha = rz / pap;
    double rr = 0.0;
    for (int c = 0; c < n; ++c) {
      u.v[c] += alpha * p[c];
      r[c] -= alpha * ap[c];
      rr += r[c] * r[c];
    }
    rnorm = std::sqrt(rr);
    ++it;
    if (rnorm <= stop) break;
    double rz_next = 0.0;
    for (int c = 0; c < n; ++c) {
      z[c] = r[c] / op.diagonal(c);
      rz_next += r[c] * z[c];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int c = 0; c < n; ++c) p[c] = z[c] + beta * p[c];
  }
  rep.iterations = it;
  rep.residual = rnorm / rhs_norm;
  return {std::move(u), rep};
}

Field solve_reaction_diffusion(const Mesh& mesh, const Field& a, const Field& b,
                               const Field& f, double tol, SolveReport* report) {
  const int n = mesh.cell_count();
  double a0 = a[0], b0 = b[0], f_sup = f[0], f_min = f[0];
  for (int c = 0; c < n; ++c) {
    a0 = std::min(a0, a[c]);
    b0 = std::min(b0, b[c]);
    f_sup = std::max(f_sup, f[c]);
    f_min = std::min(f_min, f[c]);
  }
  if (!(a0 > 0.0))
    throw InvariantViolation("solve_reaction_diffusion: diffusivity not bounded away from zero");
  if (!(b0 > 0.0))
    throw InvariantViolation("solve_reaction_diffusion: reaction coefficient not positive");
  // Exact-arithmetic data are nonnegative; admit roundoff-level dips only.
  if (f_min < -bound_slack(tol, std::abs(f_sup)))
    throw InvariantViolation("solve_reaction_diffusion: negative source term");

  const DiscreteOperator op = assemble_operator(mesh, a, b);
  Field rhs(mesh);
  for (int c = 0; c < n; ++c) rhs[c] = f[c] * mesh.cell_volume();
  auto [u, rep] = solve_spd(op, mesh, rhs, tol, 0);

  // f >= lam * b cellwise forces u >= lam; the largest such lam is min(f/b).
  double lam = f[0] / b[0];
  for (int c = 0; c < n; ++c) lam = std::min(lam, f[c] / b[c]);
  const double upper = f_sup / b0;
  rep.min_u = field_min(u);
  rep.max_u = field_max(u);
  rep.b_floor = b0;
  rep.f_sup = f_sup;
  if (rep.min_u < lam - bound_slack(tol, lam) || rep.max_u > upper + bound_slack(tol, upper))
    throw InvariantViolation(
        "solve_reaction_diffusion: maximum-principle postcondition failed: u in [" +
        std::to_string(rep.min_u) + ", " + std::to_string(rep.max_u) + "], expected [" +
        std::to_string(lam) + ", " + std::to_string(upper) + "]");
  if (report) *report = rep;
  return std::move(u);
}

}  // namespace seird
