#pragma once

#include <vector>

#include "seird/elliptic.hpp"
#include "seird/model.hpp"

namespace seird {

// Antiderivative K of the truncated diffusivity, K(y) = integral_0^y kt(z) dz.
// Because the truncation clamps kt to [n_low, n_up] and every preset is affine
// there, K is piecewise quadratic with linear tails: strictly increasing,
// bi-Lipschitz with constants kappa_low and kappa_up, K(0) = 0. Both K and
// its inverse evaluate in closed form.
class KirchhoffMap {
 public:
  double eval(double y) const;    // K
  double invert(double u) const;  // K^{-1}
  // kt(K^{-1}(u))^{-1}: the derivative of K^{-1}, in [1/kappa_up, 1/kappa_low].
  double inverse_derivative(double u) const;
  double diffusivity(double y) const;  // the truncated kt itself
  // integral_0^u K^{-1}(s) ds, the strictly convex potential whose derivative
  // is K^{-1}; evaluated through the conjugacy u K^{-1}(u) - integral(K) so it
  // stays closed-form.
  double convex_potential(double u) const;

  double lower_clamp() const { return n_lo_; }
  double upper_clamp() const { return n_up_; }
  double kappa_low() const { return k_lo_ < k_hi_ ? k_lo_ : k_hi_; }
  double kappa_up() const { return k_lo_ < k_hi_ ? k_hi_ : k_lo_; }

  friend KirchhoffMap make_kirchhoff_map(const TruncatedNonlinearity& tnl);

 private:
  double integral(double y) const;  // integral_0^y K(z) dz

  double n_lo_ = 0.0, n_up_ = 0.0;  // clamp knots
  double a_ = 0.0, b_ = 0.0;        // kt(y) = a y + b on [n_lo, n_up]
  double k_lo_ = 0.0, k_hi_ = 0.0;  // kt at the knots
  double K_lo_ = 0.0, K_up_ = 0.0;  // K at the knots
  double IK_lo_ = 0.0, IK_up_ = 0.0;
};

KirchhoffMap make_kirchhoff_map(const TruncatedNonlinearity& tnl);

inline double kirchhoff_eval(const KirchhoffMap& map, double y) { return map.eval(y); }
inline double kirchhoff_invert(const KirchhoffMap& map, double u) { return map.invert(u); }

struct NStepReport {
  int newton_iterations = 0;
  int total_cg_iterations = 0;
  std::vector<double> residual_history;   // H-norm of the nonlinear residual
  std::vector<double> objective_history;  // step functional at accepted iterates
};

// Evaluates the strictly convex step functional
//   J(u) = 1/2 integral |grad u|^2 + integral lam P(u) - (1/tau) integral n_prev u
// with P the convex potential of K^{-1} and lam = 1/tau + phi_d i_prev - alpha + mu.
double population_step_objective(const Mesh& mesh, const DiscreteOperator& stiffness,
                                 const Field& lam, const Field& n_prev,
                                 const KirchhoffMap& map, double tau, const Field& u);

// Implicit population update: solves lam K^{-1}(u) - Lap u = n_prev / tau
// under zero-flux boundaries by damped Newton on the residual (equivalently,
// minimizes J above), then returns n_next = K^{-1}(u). The per-step maximum
// principle
//   sup n_next <= sup n_prev / (1 - tau (alpha-mu)^+),
//   inf n_next >= inf n_prev / (1 + tau (phi_d sup i_prev + (mu-alpha)^+))
// is asserted on exit.
Field solve_n_step(const Mesh& mesh, const Field& n_prev, const Field& i_prev,
                   const ModelParams& params, const KirchhoffMap& map, double tau,
                   double tol = kDefaultSolveTol, NStepReport* report = nullptr);

}  // namespace seird
