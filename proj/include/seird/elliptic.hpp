#pragma once

#include <utility>

#include "seird/operator.hpp"

namespace seird {

inline constexpr double kDefaultSolveTol = 1e-10;
// Slack admitted on algebraically exact inequalities polluted by the
// iterative residual.
inline double bound_slack(double tol, double scale) {
  return 10.0 * tol * (1.0 + std::abs(scale));
}

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // final relative algebraic residual
  // Bounds certificate of the last reaction-diffusion solve.
  double min_u = 0.0;
  double max_u = 0.0;
  double b_floor = 0.0;
  double f_sup = 0.0;
};

// Diagonally preconditioned conjugate gradients for the assembled SPD
// operators. Stops at ||A u - rhs||_2 <= tol ||rhs||_2; max_iter <= 0 selects
// the default 10 * n. Throws SolverError on non-convergence.
std::pair<Field, SolveReport> solve_spd(const DiscreteOperator& op, const Mesh& mesh,
                                        const Field& rhs, double tol = kDefaultSolveTol,
                                        int max_iter = 0);

// One linear reaction-diffusion step: the discrete solution u of
//   integral(a grad u . grad v) + integral(b u v) = integral(f v)
// under zero-flux boundaries, with a >= a0 > 0, b >= b0 > 0 and f >= 0.
// The discrete weak maximum principle is asserted as a postcondition:
//   min_c(f/b) - slack <= u <= sup(f)/min(b) + slack.
Field solve_reaction_diffusion(const Mesh& mesh, const Field& a, const Field& b,
                               const Field& f, double tol = kDefaultSolveTol,
                               SolveReport* report = nullptr);

}  // namespace seird
