#pragma once

#include <array>
#include <string>
#include <vector>

#include "seird/mesh.hpp"

namespace seird {

// Binary field snapshot: a 64-byte text header
//   "SEIRD-FIELD v1 dim=<d> nx=<nx> ny=<ny> nz=<nz>"
// space-padded with a trailing newline as byte 64, followed by the cell
// values as little-endian 64-bit floats in row-major order.
struct SnapshotData {
  int dim = 1;
  std::array<int, 3> cells{1, 1, 1};
  std::vector<double> values;
};

void write_field_snapshot(const std::string& path, const Field& f);
SnapshotData read_field_snapshot(const std::string& path);

// Shortest representation that round-trips exactly; keeps CSV output
// bit-identical across runs.
std::string format_double(double x);

}  // namespace seird
