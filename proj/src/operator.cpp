#include "seird/operator.hpp"

#include <algorithm>
#include <cmath>

#include "seird/elliptic.hpp"

namespace seird {

void DiscreteOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += val[p] * x[col[p]];
    y[r] = acc;
  }
}

double DiscreteOperator::row_sum(int row) const {
  double s = 0.0;
  for (int p = row_ptr[row]; p < row_ptr[row + 1]; ++p) s += val[p];
  return s;
}

namespace {

double face_value(double ka, double kb, FaceAverage avg) {
  if (avg == FaceAverage::arithmetic) return 0.5 * (ka + kb);
  const double s = ka + kb;
  return s > 0.0 ? 2.0 * ka * kb / s : 0.0;
}

}  // namespace

DiscreteOperator assemble_operator(const Mesh& mesh, const Field& kappa_cells,
                                   const Field& b_cells, FaceAverage avg) {
  const int n = mesh.cell_count();
  for (int c = 0; c < n; ++c) {
    if (!(kappa_cells[c] >= 0.0) || !std::isfinite(kappa_cells[c]))
      throw InvariantViolation("assemble_operator: negative or non-finite diffusivity");
    if (!(b_cells[c] >= 0.0) || !std::isfinite(b_cells[c]))
      throw InvariantViolation("assemble_operator: negative or non-finite reaction coefficient");
  }

  // Count off-diagonal entries per row, then fill CSR with the diagonal first
  // in each row followed by neighbors in face order.
  std::vector<int> nnz(n, 1);
  for (const auto& f : mesh.faces()) {
    ++nnz[f.lo];
    ++nnz[f.hi];
  }
  DiscreteOperator op;
  op.n = n;
  op.row_ptr.assign(n + 1, 0);
  for (int r = 0; r < n; ++r) op.row_ptr[r + 1] = op.row_ptr[r] + nnz[r];
  op.col.assign(op.row_ptr[n], 0);
  op.val.assign(op.row_ptr[n], 0.0);
  op.diag_index.assign(n, 0);

  const double vol = mesh.cell_volume();
  std::vector<int> cursor(n);
  for (int r = 0; r < n; ++r) {
    op.diag_index[r] = op.row_ptr[r];
    op.col[op.row_ptr[r]] = r;
    op.val[op.row_ptr[r]] = b_cells[r] * vol;
    cursor[r] = op.row_ptr[r] + 1;
  }
  for (const auto& f : mesh.faces()) {
    const double k = face_value(kappa_cells[f.lo], kappa_cells[f.hi], avg);
    const double t = k * mesh.face_coeff(f.axis);
    op.val[op.diag_index[f.lo]] += t;
    op.val[op.diag_index[f.hi]] += t;
    op.col[cursor[f.lo]] = f.hi;
    op.val[cursor[f.lo]++] = -t;
    op.col[cursor[f.hi]] = f.lo;
    op.val[cursor[f.hi]++] = -t;
  }
  return op;
}

DiscreteOperator assemble_stiffness(const Mesh& mesh, const Field& kappa_cells) {
  return assemble_operator(mesh, kappa_cells, Field(mesh, 0.0));
}

double inner_product(const Field& a, const Field& b, NormKind which) {
  const Mesh& mesh = *a.mesh;
  double acc = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) acc += a[c] * b[c];
  acc *= mesh.cell_volume();
  if (which == NormKind::H) return acc;
  if (which != NormKind::V)
    throw InvariantViolation("inner_product: only H and V are inner-product norms here");
  for (const auto& f : mesh.faces()) {
    const double t = mesh.face_coeff(f.axis);
    acc += t * (a[f.hi] - a[f.lo]) * (b[f.hi] - b[f.lo]);
  }
  return acc;
}

double compute_norm(const Field& f, NormKind which) {
  if (which == NormKind::V_dual) {
    const DiscreteOperator unit_op =
        assemble_operator(*f.mesh, Field(*f.mesh, 1.0), Field(*f.mesh, 1.0));
    return dual_norm(f, unit_op);
  }
  return std::sqrt(std::max(0.0, inner_product(f, f, which)));
}

double dual_norm(const Field& g, const DiscreteOperator& unit_op) {
  const Mesh& mesh = *g.mesh;
  Field rhs(mesh);
  for (int c = 0; c < mesh.cell_count(); ++c) rhs[c] = g[c] * mesh.cell_volume();
  auto [w, report] = solve_spd(unit_op, mesh, rhs, kDefaultSolveTol, 0);
  (void)report;
  return compute_norm(w, NormKind::V);
}

}  // namespace seird
