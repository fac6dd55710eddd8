#pragma once

#include <vector>

#include "seird/mesh.hpp"

namespace seird {

// Sparse symmetric operator in compressed-row layout, assembled as a
// finite-volume discretization of (b*I - div(a grad .)) with zero-flux
// boundaries. Positive diagonal, nonpositive off-diagonals, row sums equal
// to b*volume: an M-matrix whenever b > 0.
struct DiscreteOperator {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<int> diag_index;  // position of the diagonal entry per row

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  double diagonal(int row) const { return val[diag_index[row]]; }
  double row_sum(int row) const;
};

// Face diffusivity is the harmonic mean of the adjacent cell values; the
// arithmetic switch exists for refinement studies only.
enum class FaceAverage { harmonic, arithmetic };

// kappa_cells >= 0 and b_cells >= 0 elementwise (negative values are
// rejected); the strict positivity demanded by the single linear
// reaction-diffusion step is enforced there, so a pure-reaction operator
// (kappa == 0) and a pure-stiffness operator (b == 0) are both expressible.
DiscreteOperator assemble_operator(const Mesh& mesh, const Field& kappa_cells,
                                   const Field& b_cells,
                                   FaceAverage avg = FaceAverage::harmonic);

// Stiffness-only variant (b == 0, zero row sums).
DiscreteOperator assemble_stiffness(const Mesh& mesh, const Field& kappa_cells);

enum class NormKind { H, V, V_dual };

// H = L2 over cells; V adds the two-point face-gradient energy;
// V_dual goes through the discrete Riesz map (solve (I - Lap)w = g with unit
// reaction and unit diffusivity, return the V-norm of w).
double compute_norm(const Field& f, NormKind which);

// H and V inner products (V_dual is not an inner-product route here).
double inner_product(const Field& a, const Field& b, NormKind which);

// Riesz route with a caller-provided unit-coefficient operator, letting
// repeated dual-norm evaluations share one assembly.
double dual_norm(const Field& g, const DiscreteOperator& unit_op);

}  // namespace seird
