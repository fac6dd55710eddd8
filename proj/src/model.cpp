#include "seird/model.hpp"

namespace seird {

namespace {
double pos_part(double x) { return x > 0.0 ? x : 0.0; }
}  // namespace

void ModelParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError(0, "params.alpha", "alpha must be positive");
  if (!(mu > 0.0)) throw ConfigError(0, "params.mu", "mu must be positive");
  const double rates[] = {beta_i, beta_e, sigma, phi_e, phi_r, phi_d};
  const char* names[] = {"params.beta_i", "params.beta_e", "params.sigma",
                         "params.phi_e",  "params.phi_r",  "params.phi_d"};
  for (int k = 0; k < 6; ++k)
    if (!(rates[k] >= 0.0)) throw ConfigError(0, names[k], "rate must be nonnegative");
  if (normalized) {
    const bool canonical = beta_i == 1.0 && beta_e == 1.0 && sigma == 1.0 &&
                           phi_e == 0.0 && phi_r == 1.0 && phi_d == 1.0;
    if (!canonical)
      throw ConfigError(0, "params.normalized",
                        "normalized mode fixes beta_i=beta_e=sigma=phi_r=phi_d=1, phi_e=0");
  }
}

ModelParams normalized_params(double alpha, double mu) {
  ModelParams p;
  p.alpha = alpha;
  p.mu = mu;
  p.validate();
  return p;
}

void Nonlinearity::validate() const {
  if (a_kind == AKind::constant && !(a_value >= 0.0))
    throw ConfigError(0, "A.value", "constant A must be nonnegative");
  if (a_kind == AKind::saturating && !(a_threshold >= 0.0))
    throw ConfigError(0, "A.threshold", "saturation threshold must be nonnegative");
  switch (kappa_kind) {
    case KappaKind::constant:
      if (!(kappa_value > 0.0))
        throw ConfigError(0, "kappa.value", "constant kappa must be positive");
      break;
    case KappaKind::linear:
      break;  // positive on (0, inf) by definition
    case KappaKind::affine:
      if (!(kappa_slope > 0.0) || !(kappa_offset > 0.0))
        throw ConfigError(0, "kappa.slope", "affine kappa requires positive slope and offset");
      break;
  }
}

BoundsLedger compute_bounds(const ModelParams& params, const Nonlinearity& nl, double T,
                            double sup_n0, double sup_s0, double sup_h0, double sup_i0,
                            double inf_n0) {
  params.validate();
  nl.validate();
  if (!(T > 0.0)) throw ConfigError(0, "time.T", "horizon must be positive");
  if (!(inf_n0 > 0.0))
    throw ConfigError(0, "init.n", "initial population must be bounded away from zero");
  if (!(sup_n0 >= inf_n0) || !(sup_s0 >= 0.0) || !(sup_h0 >= 0.0) || !(sup_i0 >= 0.0))
    throw ConfigError(0, "init", "initial suprema must be nonnegative and sup n0 >= inf n0");

  BoundsLedger lg;
  lg.n_up = std::exp(2.0 * T * pos_part(params.alpha - params.mu)) * sup_n0;
  lg.s_up = sup_s0 + T * params.alpha * lg.n_up;
  lg.h_up = sup_h0 + T * (params.alpha * lg.n_up + params.h_decay() * lg.s_up);
  lg.i_up = sup_i0 + T * params.sigma * (lg.h_up + lg.s_up);
  lg.n_low = std::exp(-T * (params.phi_d * lg.i_up + pos_part(params.mu - params.alpha))) * inf_n0;

  // Every preset is monotone on (0, inf), so the extrema sit at the ends.
  const double at_low = nl.diffusivity(lg.n_low);
  const double at_up = nl.diffusivity(lg.n_up);
  lg.kappa_low = std::min(at_low, at_up);
  lg.kappa_up = std::max(at_low, at_up);
  return lg;
}

TruncatedNonlinearity truncate_nonlinearity(const Nonlinearity& nl,
                                            const BoundsLedger& ledger) {
  if (!(ledger.n_low > 0.0) || !(ledger.n_low <= ledger.n_up) || !(ledger.kappa_low > 0.0))
    throw InvariantViolation("truncate_nonlinearity: ledger is not valid");
  return TruncatedNonlinearity{nl, ledger};
}

TauCheck validate_tau(const ModelParams& params, double tau) {
  if (!(tau > 0.0)) return {false, "step size must be positive"};
  if (!(tau < 1.0)) return {false, "step-size cap: tau must be < 1"};
  if (params.alpha > params.mu) {
    const double cap = 1.0 / (2.0 * (params.alpha - params.mu));
    if (tau > cap)
      return {false, "step-restriction: tau must be <= 1/(2(alpha-mu)) = " + std::to_string(cap)};
  }
  return {true, ""};
}

}  // namespace seird
