#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "seird/errors.hpp"

namespace seird {

// Epidemiological rate constants. The analysis only distinguishes alpha
// (birth) and mu (baseline mortality); in normalized mode every other rate
// collapses to the canonical values below, so the four evolution equations
// carry coefficients 1 exactly. Generalized values are carried through all
// coefficient formulas when normalized == false.
struct ModelParams {
  double alpha = 1.0;   // birth rate, > 0
  double mu = 1.0;      // baseline mortality, > 0
  double beta_i = 1.0;  // contact rate with infected
  double beta_e = 1.0;  // contact rate with exposed
  double sigma = 1.0;   // exposed -> infected
  double phi_e = 0.0;   // exposed -> recovered
  double phi_r = 1.0;   // infected -> recovered
  double phi_d = 1.0;   // death-rate coefficient, applied to the product i*n
  bool normalized = true;

  // Decay coefficient of the h = s + e equation.
  double h_decay() const { return sigma + phi_e; }

  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

ModelParams normalized_params(double alpha, double mu);

// The structural nonlinearities A (contact attenuation, nonnegative) and
// kappa (diffusivity, strictly positive), restricted to a closed set of
// presets so that their extrema over an interval have closed forms.
struct Nonlinearity {
  enum class AKind { constant, saturating };
  enum class KappaKind { constant, linear, affine };

  AKind a_kind = AKind::constant;
  double a_value = 1.0;      // constant preset
  double a_threshold = 0.0;  // saturating preset: A(y) = max(0, 1 - a_threshold / y)

  KappaKind kappa_kind = KappaKind::constant;
  double kappa_value = 1.0;  // constant preset
  double kappa_slope = 1.0;  // affine preset: kappa(y) = slope * y + offset
  double kappa_offset = 0.0;

  double contact_attenuation(double y) const {
    if (a_kind == AKind::constant) return a_value;
    return std::max(0.0, 1.0 - a_threshold / y);
  }
  double diffusivity(double y) const {
    switch (kappa_kind) {
      case KappaKind::constant: return kappa_value;
      case KappaKind::linear: return y;
      case KappaKind::affine: return kappa_slope * y + kappa_offset;
    }
    return kappa_value;
  }
  // Affine representation of the diffusivity on (0, inf): kappa(y) = a*y + b.
  void kappa_affine(double& a, double& b) const {
    switch (kappa_kind) {
      case KappaKind::constant: a = 0.0; b = kappa_value; return;
      case KappaKind::linear: a = 1.0; b = 0.0; return;
      case KappaKind::affine: a = kappa_slope; b = kappa_offset; return;
    }
  }

  void validate() const;
  bool operator==(const Nonlinearity&) const = default;
};

// Closed-form a-priori constants boxing every discrete iterate, computed
// from the data before any solve.
struct BoundsLedger {
  double n_up = 0.0;   // population upper bound
  double s_up = 0.0;   // susceptible upper bound
  double h_up = 0.0;   // s + e upper bound
  double i_up = 0.0;   // infected upper bound
  double n_low = 0.0;  // population lower bound, > 0
  double kappa_low = 0.0;  // min of kappa over [n_low, n_up]
  double kappa_up = 0.0;   // max of kappa over [n_low, n_up]
};

// Evaluates the ledger's closed forms. With normalized params these are
//   n_up  = e^{2 T (alpha-mu)^+} sup n0
//   s_up  = sup s0 + T alpha n_up
//   h_up  = sup h0 + T (alpha n_up + s_up)
//   i_up  = sup i0 + T (h_up + s_up)
//   n_low = e^{-T (i_up + (mu-alpha)^+)} inf n0;
// generalized rates enter as coefficients of the s_up/h_up terms and of i_up
// inside n_low, reducing to the above when they equal 1.
BoundsLedger compute_bounds(const ModelParams& params, const Nonlinearity& nl, double T,
                            double sup_n0, double sup_s0, double sup_h0, double sup_i0,
                            double inf_n0);

// A and kappa composed with the clamp onto [n_low, n_up]. Globally Lipschitz,
// equal to the originals on the trust interval, and kappa-bounded by the
// ledger's kappa_low/kappa_up everywhere.
struct TruncatedNonlinearity {
  Nonlinearity base;
  BoundsLedger ledger;

  double clamp(double y) const {
    return std::max(ledger.n_low, std::min(y, ledger.n_up));
  }
  double contact_attenuation(double y) const {
    return base.contact_attenuation(clamp(y));
  }
  double diffusivity(double y) const { return base.diffusivity(clamp(y)); }
};

TruncatedNonlinearity truncate_nonlinearity(const Nonlinearity& nl,
                                            const BoundsLedger& ledger);

// Step-size admissibility: tau < 1 always, and tau <= 1/(2(alpha-mu)) when
// alpha > mu, which keeps 1/tau - alpha + mu >= 1/(2 tau) > 0.
struct TauCheck {
  bool admissible = false;
  std::string reason;
};

TauCheck validate_tau(const ModelParams& params, double tau);

}  // namespace seird
