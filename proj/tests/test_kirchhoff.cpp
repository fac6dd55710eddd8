#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "seird/kirchhoff.hpp"

using namespace seird;

namespace {

BoundsLedger hand_ledger(double n_low, double n_up) {
  BoundsLedger lg;
  lg.n_low = n_low;
  lg.n_up = n_up;
  lg.s_up = lg.h_up = lg.i_up = 1.0;
  lg.kappa_low = 1.0;
  lg.kappa_up = 1.0;
  return lg;
}

KirchhoffMap linear_map(double n_low, double n_up) {
  Nonlinearity nl;
  nl.kappa_kind = Nonlinearity::KappaKind::linear;
  BoundsLedger lg = hand_ledger(n_low, n_up);
  lg.kappa_low = n_low;
  lg.kappa_up = n_up;
  return make_kirchhoff_map(truncate_nonlinearity(nl, lg));
}

// Composite Simpson quadrature of K^{-1}, split at the transform's interior
// breakpoints so the integrand is smooth on every panel.
double quadrature_potential(const KirchhoffMap& map, double u) {
  std::vector<double> cuts{0.0, u};
  for (double knot : {map.eval(map.lower_clamp()), map.eval(map.upper_clamp())})
    if (knot > std::min(0.0, u) && knot < std::max(0.0, u)) cuts.push_back(knot);
  std::sort(cuts.begin(), cuts.end());
  if (u < 0.0) std::reverse(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const int panels = 2000;
    const double h = (b - a) / panels;
    double local = map.invert(a) + map.invert(b);
    for (int j = 1; j < panels; ++j)
      local += (j % 2 ? 4.0 : 2.0) * map.invert(a + j * h);
    acc += local * h / 3.0;
  }
  return acc;
}

}  // namespace

TEST_CASE("transform: constant diffusivity is a linear map") {
  Nonlinearity nl;
  nl.kappa_kind = Nonlinearity::KappaKind::constant;
  nl.kappa_value = 2.5;
  BoundsLedger lg = hand_ledger(0.5, 2.0);
  lg.kappa_low = lg.kappa_up = 2.5;
  const KirchhoffMap map = make_kirchhoff_map(truncate_nonlinearity(nl, lg));
  CHECK(map.eval(3.0) == doctest::Approx(7.5).epsilon(1e-15));
  CHECK(map.eval(0.0) == 0.0);
  CHECK(map.invert(7.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(map.invert(-1.0) == doctest::Approx(-0.4).epsilon(1e-15));
}

TEST_CASE("transform: linear diffusivity truncated to [0.5, 2] at y = 1") {
  const KirchhoffMap map = linear_map(0.5, 2.0);
  // piecewise antiderivative evaluated by hand: 0.5*0.5 + (0.5 - 0.125)
  CHECK(map.eval(1.0) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(map.eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(map.invert(0.625) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("transform: round-trip and bi-Lipschitz bounds on random points") {
  oracle::Rng rng(61);
  for (int variant = 0; variant < 3; ++variant) {
    Nonlinearity nl;
    BoundsLedger lg = hand_ledger(rng.uniform(0.05, 0.5), rng.uniform(1.0, 4.0));
    if (variant == 0) {
      nl.kappa_kind = Nonlinearity::KappaKind::constant;
      nl.kappa_value = rng.uniform(0.2, 3.0);
    } else if (variant == 1) {
      nl.kappa_kind = Nonlinearity::KappaKind::linear;
    } else {
      nl.kappa_kind = Nonlinearity::KappaKind::affine;
      nl.kappa_slope = rng.uniform(0.2, 2.0);
      nl.kappa_offset = rng.uniform(0.2, 2.0);
    }
    const double at_lo = nl.diffusivity(lg.n_low), at_up = nl.diffusivity(lg.n_up);
    lg.kappa_low = std::min(at_lo, at_up);
    lg.kappa_up = std::max(at_lo, at_up);
    const KirchhoffMap map = make_kirchhoff_map(truncate_nonlinearity(nl, lg));

    CHECK(map.eval(0.0) == 0.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double y = rng.uniform(-10.0, 20.0);
      worst = std::max(worst, std::abs(map.invert(map.eval(y)) - y));
      const double y2 = rng.uniform(-10.0, 20.0);
      if (y == y2) continue;
      const double ratio = std::abs(map.eval(y) - map.eval(y2)) / std::abs(y - y2);
      CHECK(ratio >= lg.kappa_low - 1e-12);
      CHECK(ratio <= lg.kappa_up + 1e-12);
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("transform: convex potential matches numerical quadrature of the inverse") {
  oracle::Rng rng(67);
  Nonlinearity nl;
  nl.kappa_kind = Nonlinearity::KappaKind::affine;
  nl.kappa_slope = 0.8;
  nl.kappa_offset = 0.3;
  BoundsLedger lg = hand_ledger(0.4, 2.5);
  lg.kappa_low = nl.diffusivity(0.4);
  lg.kappa_up = nl.diffusivity(2.5);
  const KirchhoffMap map = make_kirchhoff_map(truncate_nonlinearity(nl, lg));
  CHECK(map.convex_potential(0.0) == 0.0);
  for (int k = 0; k < 12; ++k) {
    const double u = rng.uniform(-2.0, 8.0);
    CHECK(map.convex_potential(u) ==
          doctest::Approx(quadrature_potential(map, u)).epsilon(1e-9));
  }
}

TEST_CASE("transform: inverse derivative agrees with finite differences") {
  const KirchhoffMap map = linear_map(0.5, 2.0);
  oracle::Rng rng(71);
  for (int k = 0; k < 200; ++k) {
    const double u = rng.uniform(-1.0, 5.0);
    const double eps = 1e-6;
    const double fd = (map.invert(u + eps) - map.invert(u - eps)) / (2.0 * eps);
    CHECK(map.inverse_derivative(u) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("population step: homogeneous data reduce to the scalar update") {
  const Mesh m = build_mesh(1, {12, 1, 1}, {1.0, 1.0, 1.0});
  const KirchhoffMap map = linear_map(0.05, 5.0);
  const double tau = 0.05, c = 1.4;

  ModelParams p = normalized_params(0.5, 1.0);
  Field n1 = solve_n_step(m, Field(m, c), Field(m, 0.0), p, map, tau);
  for (int cix = 0; cix < m.cell_count(); ++cix)
    CHECK(n1[cix] == doctest::Approx(c / (1.0 + tau * (1.0 - 0.5))).epsilon(1e-11));

  const double gamma = 0.7;
  n1 = solve_n_step(m, Field(m, c), Field(m, gamma), p, map, tau);
  for (int cix = 0; cix < m.cell_count(); ++cix)
    CHECK(n1[cix] ==
          doctest::Approx(c / (1.0 + tau * (gamma + 1.0 - 0.5))).epsilon(1e-11));
}

TEST_CASE("population step: dense Newton-LU oracle agreement on random data") {
  oracle::Rng rng(73);
  const Mesh m = build_mesh(1, {16, 1, 1}, {1.0, 1.0, 1.0});
  const KirchhoffMap map = linear_map(0.2, 4.0);
  const ModelParams p = normalized_params(0.8, 0.6);
  for (int trial = 0; trial < 12; ++trial) {
    const double tau = rng.uniform(0.02, 0.2);
    const Field n_prev = oracle::random_field(m, rng, 0.5, 3.0);
    const Field i_prev = oracle::random_field(m, rng, 0.0, 1.0);
    const Field mine = solve_n_step(m, n_prev, i_prev, p, map, tau);
    const Field dense = oracle::dense_population_step(m, n_prev, i_prev, p, map, tau);
    CHECK(max_abs_diff(mine, dense) <= 1e-8);
  }
}

TEST_CASE("population step: objective descent and minimizer property") {
  oracle::Rng rng(79);
  const Mesh m = build_mesh(1, {20, 1, 1}, {1.0, 1.0, 1.0});
  const KirchhoffMap map = linear_map(0.2, 4.0);
  const ModelParams p = normalized_params(0.9, 0.5);
  const double tau = 0.1;
  const Field n_prev = oracle::random_field(m, rng, 0.5, 3.0);
  const Field i_prev = oracle::random_field(m, rng, 0.0, 1.0);

  NStepReport rep;
  const Field n_next = solve_n_step(m, n_prev, i_prev, p, map, tau, kDefaultSolveTol, &rep);
  for (std::size_t j = 1; j < rep.objective_history.size(); ++j)
    CHECK(rep.objective_history[j] <=
          rep.objective_history[j - 1] + 1e-12 * std::abs(rep.objective_history[j - 1]));

  const DiscreteOperator stiffness = assemble_stiffness(m, Field(m, 1.0));
  Field lam(m), u_star(m);
  for (int c = 0; c < m.cell_count(); ++c) {
    lam[c] = 1.0 / tau + i_prev[c] - p.alpha + p.mu;
    u_star[c] = map.eval(n_next[c]);
  }
  const double j_star = population_step_objective(m, stiffness, lam, n_prev, map, tau, u_star);
  for (int k = 0; k < 100; ++k) {
    Field v = u_star;
    for (int c = 0; c < m.cell_count(); ++c) v[c] += rng.uniform(-0.3, 0.3);
    CHECK(j_star <= population_step_objective(m, stiffness, lam, n_prev, map, tau, v) + 1e-10);
  }
}

TEST_CASE("population step: per-step maximum principle bounds") {
  oracle::Rng rng(83);
  const Mesh m = build_mesh(2, {8, 8, 1}, {1.0, 1.0, 1.0});
  const KirchhoffMap map = linear_map(0.1, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = normalized_params(rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5));
    const double cap = p.alpha > p.mu ? 1.0 / (2.0 * (p.alpha - p.mu)) : 0.9;
    const double tau = rng.uniform(0.01, std::min(0.25, cap));
    const Field n_prev = oracle::random_field(m, rng, 0.4, 4.0);
    const Field i_prev = oracle::random_field(m, rng, 0.0, 1.5);
    const Field n_next = solve_n_step(m, n_prev, i_prev, p, map, tau);
    const double up = std::max(p.alpha - p.mu, 0.0);
    const double dn = std::max(p.mu - p.alpha, 0.0);
    CHECK(field_max(n_next) <= field_max(n_prev) / (1.0 - tau * up) + 1e-9);
    CHECK(field_min(n_next) >=
          field_min(n_prev) / (1.0 + tau * (field_max(i_prev) + dn)) - 1e-9);
    CHECK(field_min(n_next) >= -1e-9);
  }
}

TEST_CASE("population step: rejects invalid inputs") {
  const Mesh m = build_mesh(1, {4, 1, 1}, {1.0, 1.0, 1.0});
  const KirchhoffMap map = linear_map(0.2, 4.0);
  const ModelParams p = normalized_params(2.0, 1.0);
  CHECK_THROWS_AS(solve_n_step(m, Field(m, 1.0), Field(m, 0.0), p, map, 0.75),
                  InvariantViolation);  // tau beyond the step restriction
  Field neg(m, 1.0);
  neg[2] = -0.5;
  CHECK_THROWS_AS(solve_n_step(m, Field(m, 1.0), neg, p, map, 0.1), InvariantViolation);
}
