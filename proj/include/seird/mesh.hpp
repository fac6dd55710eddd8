#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "seird/errors.hpp"

namespace seird {

// Structured axis-aligned cell-centered mesh on a box, up to three axes.
// Every outer boundary face carries the natural zero-flux condition, so only
// interior faces are stored. Immutable after build_mesh.
class Mesh {
 public:
  // Interior face between cells lo < hi, adjacent along `axis`.
  struct Face {
    int lo;
    int hi;
    int axis;
  };

  int dim() const { return dim_; }
  const std::array<int, 3>& cells() const { return cells_; }
  const std::array<double, 3>& lengths() const { return lengths_; }
  const std::array<double, 3>& spacing() const { return spacing_; }

  int cell_count() const { return cells_[0] * cells_[1] * cells_[2]; }
  double cell_volume() const { return volume_; }
  double face_area(int axis) const { return volume_ / spacing_[axis]; }
  // Two-point transmissibility of a unit-diffusivity interior face.
  double face_coeff(int axis) const { return face_area(axis) / spacing_[axis]; }

  int index(int i, int j, int k) const {
    return (k * cells_[1] + j) * cells_[0] + i;
  }
  // Center coordinate of cell `c` along `axis`.
  double center(int c, int axis) const {
    const int i = coord(c, axis);
    return (i + 0.5) * spacing_[axis];
  }
  int coord(int c, int axis) const {
    if (axis == 0) return c % cells_[0];
    if (axis == 1) return (c / cells_[0]) % cells_[1];
    return c / (cells_[0] * cells_[1]);
  }

  const std::vector<Face>& faces() const { return faces_; }

  friend Mesh build_mesh(int dim, std::array<int, 3> cells_per_axis,
                         std::array<double, 3> lengths);

 private:
  int dim_ = 1;
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  double volume_ = 1.0;
  std::vector<Face> faces_;
};

Mesh build_mesh(int dim, std::array<int, 3> cells_per_axis,
                std::array<double, 3> lengths);

// One scalar value per cell. The mesh must outlive the field.
struct Field {
  const Mesh* mesh = nullptr;
  std::vector<double> v;

  Field() = default;
  Field(const Mesh& m, double fill = 0.0) : mesh(&m), v(m.cell_count(), fill) {}

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int c) { return v[c]; }
  double operator[](int c) const { return v[c]; }
};

double field_min(const Field& f);
double field_max(const Field& f);
// Volume-weighted sum, i.e. the integral of the piecewise-constant function.
double field_integral(const Field& f);
bool field_finite(const Field& f);
double max_abs_diff(const Field& a, const Field& b);

}  // namespace seird
