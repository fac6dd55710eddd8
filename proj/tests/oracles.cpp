#include "oracles.hpp"

#include <stdexcept>

namespace oracle {

using seird::Field;
using seird::Mesh;

Eigen::MatrixXd dense_operator(const Mesh& mesh, const Field& kappa, const Field& b) {
  const int n = mesh.cell_count();
  const auto& cells = mesh.cells();
  const auto& h = mesh.spacing();
  const double vol = mesh.cell_volume();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);

  auto flat = [&](int i, int j, int k) { return (k * cells[1] + j) * cells[0] + i; };
  for (int k = 0; k < cells[2]; ++k)
    for (int j = 0; j < cells[1]; ++j)
      for (int i = 0; i < cells[0]; ++i) {
        const int c = flat(i, j, k);
        M(c, c) += b[c] * vol;
        const int idx[3] = {i, j, k};
        for (int axis = 0; axis < mesh.dim(); ++axis) {
          if (idx[axis] + 1 >= cells[axis]) continue;
          const int nb = axis == 0 ? flat(i + 1, j, k)
                       : axis == 1 ? flat(i, j + 1, k)
                                   : flat(i, j, k + 1);
          const double ks = kappa[c] + kappa[nb];
          const double kf = ks > 0.0 ? 2.0 * kappa[c] * kappa[nb] / ks : 0.0;
          const double t = kf * (vol / h[axis]) / h[axis];
          M(c, c) += t;
          M(nb, nb) += t;
          M(c, nb) -= t;
          M(nb, c) -= t;
        }
      }
  return M;
}

Field dense_reaction_diffusion(const Mesh& mesh, const Field& a, const Field& b,
                               const Field& f) {
  const int n = mesh.cell_count();
  const Eigen::MatrixXd M = dense_operator(mesh, a, b);
  Eigen::VectorXd rhs(n);
  for (int c = 0; c < n; ++c) rhs[c] = f[c] * mesh.cell_volume();
  const Eigen::VectorXd u = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
  Field out(mesh);
  for (int c = 0; c < n; ++c) out[c] = u[c];
  return out;
}

Field dense_mollify(const Mesh& mesh, const Field& u, double tau) {
  return dense_reaction_diffusion(mesh, Field(mesh, tau), Field(mesh, 1.0), u);
}

Field dense_population_step(const Mesh& mesh, const Field& n_prev, const Field& i_prev,
                            const seird::ModelParams& params, const seird::KirchhoffMap& map,
                            double tau) {
  const int n = mesh.cell_count();
  const double vol = mesh.cell_volume();
  const Eigen::MatrixXd S = dense_operator(mesh, Field(mesh, 1.0), Field(mesh, 0.0));

  Eigen::VectorXd lam(n), u(n), rhs(n);
  for (int c = 0; c < n; ++c) {
    lam[c] = 1.0 / tau + params.phi_d * i_prev[c] - params.alpha + params.mu;
    u[c] = map.eval(n_prev[c]);
    rhs[c] = n_prev[c] * vol / tau;
  }

  double rhs_norm = rhs.norm();
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd F = S * u - rhs;
    for (int c = 0; c < n; ++c) F[c] += lam[c] * map.invert(u[c]) * vol;
    if (F.norm() <= 1e-13 * rhs_norm) break;
    Eigen::MatrixXd J = S;
    for (int c = 0; c < n; ++c) J(c, c) += lam[c] * map.inverse_derivative(u[c]) * vol;
    u -= Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(F);
    if (iter == 59) throw std::runtime_error("dense_population_step: Newton stalled");
  }

  Field out(mesh);
  for (int c = 0; c < n; ++c) out[c] = map.invert(u[c]);
  return out;
}

ScalarState scalar_step(const ScalarState& st, const seird::ModelParams& params,
                        const seird::TruncatedNonlinearity& tnl, double tau) {
  const auto& p = params;
  ScalarState next;
  next.n = st.n / (1.0 + tau * (p.phi_d * st.i + p.mu - p.alpha));
  const double contact =
      tnl.contact_attenuation(next.n) * (p.beta_i * st.i + p.beta_e * (st.h - st.s));
  next.s = (st.s / tau + p.alpha * next.n) / (1.0 / tau + contact + p.mu);
  next.h = (st.h / tau + p.alpha * next.n + p.h_decay() * next.s) /
           (1.0 / tau + p.mu + p.h_decay());
  next.i = (st.i / tau + p.sigma * (next.h - next.s)) /
           (1.0 / tau + p.phi_d * next.n + p.phi_r + p.mu);
  next.d = st.d + tau * p.phi_d * next.i * next.n;
  return next;
}

Field random_field(const Mesh& mesh, Rng& rng, double lo, double hi) {
  Field f(mesh);
  for (int c = 0; c < mesh.cell_count(); ++c) f[c] = rng.uniform(lo, hi);
  return f;
}

}  // namespace oracle
