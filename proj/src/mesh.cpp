#include "seird/mesh.hpp"

#include <algorithm>
#include <limits>

namespace seird {

Mesh build_mesh(int dim, std::array<int, 3> cells_per_axis,
                std::array<double, 3> lengths) {
  if (dim < 1 || dim > 3) throw ConfigError(0, "mesh.dim", "mesh.dim must be 1, 2 or 3");
  Mesh m;
  m.dim_ = dim;
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      cells_per_axis[a] = 1;
      lengths[a] = 1.0;
    }
    if (cells_per_axis[a] < 1)
      throw ConfigError(0, "mesh.cells", "cell count must be positive on every axis");
    if (!(lengths[a] > 0.0))
      throw ConfigError(0, "mesh.lengths", "axis length must be positive");
  }
  m.cells_ = cells_per_axis;
  m.lengths_ = lengths;
  for (int a = 0; a < 3; ++a) m.spacing_[a] = lengths[a] / cells_per_axis[a];
  m.volume_ = m.spacing_[0] * m.spacing_[1] * m.spacing_[2];

  const std::array<int, 3> stride = {1, m.cells_[0], m.cells_[0] * m.cells_[1]};
  for (int k = 0; k < m.cells_[2]; ++k)
    for (int j = 0; j < m.cells_[1]; ++j)
      for (int i = 0; i < m.cells_[0]; ++i) {
        const int c = m.index(i, j, k);
        const std::array<int, 3> pos = {i, j, k};
        for (int a = 0; a < dim; ++a)
          if (pos[a] + 1 < m.cells_[a]) m.faces_.push_back({c, c + stride[a], a});
      }
  return m;
}

double field_min(const Field& f) {
  return *std::min_element(f.v.begin(), f.v.end());
}

double field_max(const Field& f) {
  return *std::max_element(f.v.begin(), f.v.end());
}

double field_integral(const Field& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.mesh->cell_volume();
}

bool field_finite(const Field& f) {
  for (double x : f.v)
    if (!std::isfinite(x)) return false;
  return true;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.v.size(); ++c)
    m = std::max(m, std::abs(a.v[c] - b.v[c]));
  return m;
}

}  // namespace seird
