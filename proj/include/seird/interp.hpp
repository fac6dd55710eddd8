#pragma once

#include <string>
#include <vector>

#include "seird/config.hpp"
#include "seird/operator.hpp"

namespace seird {

// Forward-constant, backward-constant and piecewise-linear reconstructions of
// a time-sampled sequence z_0 .. z_N with uniform step tau. On the interval
// ((k-1)tau, k tau] the forward constant is z_k, the backward constant is
// z_{k-1}, and the linear interpolant joins them; knots evaluate exactly.
struct InterpolantSet {
  double tau = 1.0;
  std::vector<Field> samples;

  int segments() const { return static_cast<int>(samples.size()) - 1; }
  double horizon() const { return tau * segments(); }

  Field forward_const(double t) const;
  Field backward_const(double t) const;
  Field linear(double t) const;

  // Index of the interval containing t, in 1 .. N.
  int interval_of(double t) const;
};

InterpolantSet build_interpolants(std::vector<Field> samples, double tau);
// Scalar sequences live on a shared one-cell unit-volume mesh, where the H
// and V norms coincide with the absolute value.
InterpolantSet build_interpolants(const std::vector<double>& scalar_samples, double tau);
const Mesh& unit_mesh();

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;  // quadrature route over interpolant evaluations
  double rhs = 0.0;  // closed form over the samples
  bool equality = true;

  double gap() const;
  bool holds(double rel_tol) const;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  double max_equality_gap() const;
  bool all_hold(double rel_tol) const;
};

// Recomputes each interpolation identity two ways: time integrals by exact
// per-interval quadrature of the evaluated interpolants (the integrands are
// piecewise polynomial of degree <= 2, so Simpson nodes suffice), sample
// sums by their closed forms. Inequalities are recorded with their slack.
IdentityReport verify_interpolant_identities(const InterpolantSet& set, NormKind space);

// Exact L2(0,T;Z) distance between the two piecewise-linear interpolants,
// integrated over the union of both knot sets.
double l2_time_distance(const InterpolantSet& a, const InterpolantSet& b, NormKind space);

struct StudyRow {
  double tau = 0.0;  // finer step of the compared pair
  double dist_n = 0.0, dist_s = 0.0, dist_i = 0.0, dist_h = 0.0;
  double dist_combined = 0.0;
  double order_estimate = 0.0;  // NaN until two consecutive pairs exist
  double cauchy_ratio = 0.0;    // NaN likewise
};

struct StudyTable {
  std::vector<double> taus;
  std::vector<StudyRow> rows;  // one per consecutive refinement pair
};

// Runs the simulation once per step count (monotone refinement expected),
// compares consecutive linear-in-time reconstructions in L2(0,T;H) per
// unknown and attaches Richardson order estimates.
StudyTable convergence_study(const RunConfig& base, const std::vector<int>& step_counts);

}  // namespace seird
