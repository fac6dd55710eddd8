// Independent reference implementations used only by the test suites: dense
// brute-force assembly, direct factorization solves, a zero-dimensional
// backward-Euler integrator, and deterministic random data helpers. None of
// them share code with the library solve paths.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "seird/kirchhoff.hpp"
#include "seird/mesh.hpp"
#include "seird/model.hpp"

namespace oracle {

// Brute-force dense finite-volume matrix of (b I - div(a grad .)) with
// harmonic face averaging; traverses cells by coordinates, not by the mesh's
// face list.
Eigen::MatrixXd dense_operator(const seird::Mesh& mesh, const seird::Field& kappa,
                               const seird::Field& b);

// Direct LU solve of the dense reaction-diffusion system.
seird::Field dense_reaction_diffusion(const seird::Mesh& mesh, const seird::Field& a,
                                      const seird::Field& b, const seird::Field& f);

// Dense (I - tau Lap) u_s = u.
seird::Field dense_mollify(const seird::Mesh& mesh, const seird::Field& u, double tau);

// Dense undamped Newton with LU linear algebra for the implicit population
// step; tolerance far below the library default.
seird::Field dense_population_step(const seird::Mesh& mesh, const seird::Field& n_prev,
                                   const seird::Field& i_prev,
                                   const seird::ModelParams& params,
                                   const seird::KirchhoffMap& map, double tau);

// Space-independent backward-Euler update of the four algebraic equations
// (diffusion drops out on homogeneous data).
struct ScalarState {
  double n = 0.0, s = 0.0, i = 0.0, h = 0.0, d = 0.0;
};

ScalarState scalar_step(const ScalarState& st, const seird::ModelParams& params,
                        const seird::TruncatedNonlinearity& tnl, double tau);

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  }
  std::mt19937_64 gen;
};

seird::Field random_field(const seird::Mesh& mesh, Rng& rng, double lo, double hi);

}  // namespace oracle
