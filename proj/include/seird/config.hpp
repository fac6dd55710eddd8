#pragma once

#include <array>
#include <string>

#include "seird/mesh.hpp"
#include "seird/model.hpp"

namespace seird {

// Initial-field recipe for one unknown.
struct InitSpec {
  enum class Preset { constant, gaussian, rectangle, raster };

  Preset preset = Preset::constant;
  double value = 0.0;  // constant
  // gaussian: floor + amplitude * exp(-|x - center|^2 / (2 width^2))
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double width = 0.1;
  double amplitude = 1.0;
  double floor_value = 0.0;
  // rectangle: `inside` on the closed box [lo, hi], `outside` elsewhere
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{0.0, 0.0, 0.0};
  double inside = 1.0;
  double outside = 0.0;
  std::string path;  // raster: SEIRD-FIELD v1 snapshot

  bool operator==(const InitSpec&) const = default;
};

struct MeshSpec {
  int dim = 1;
  std::array<int, 3> cells{16, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  bool operator==(const MeshSpec&) const = default;
};

struct RunConfig {
  MeshSpec mesh;
  double T = 1.0;
  int N = 16;
  ModelParams params;
  Nonlinearity nonlinearity;
  InitSpec init_n{InitSpec::Preset::constant, 1.0};
  InitSpec init_s{InitSpec::Preset::constant, 0.5};
  InitSpec init_i{InitSpec::Preset::constant, 0.0};
  InitSpec init_h{InitSpec::Preset::constant, 0.5};
  double init_d = 0.0;
  bool mollify = false;
  double tol = 1e-10;
  std::string output_dir = "out";
  int output_every = 1;
  double probe_gronwall_c = 20.0;
  double probe_delta = 1e-6;
  std::string probe_target = "n";

  double tau() const { return T / N; }

  bool operator==(const RunConfig&) const = default;
};

// Flat `key = value` format with `#` comments and dotted section keys.
// Unknown keys, duplicate keys and invariant violations are rejected at
// parse time with the offending line or key.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string emit_config(const RunConfig& config);

Mesh build_mesh_from(const MeshSpec& spec);
Field build_initial_field(const Mesh& mesh, const InitSpec& spec);

// Re-runs the data checks (positivity of n0, ordering h0 >= s0 >= 0, i0 >= 0,
// step admissibility); parse_config calls this, programmatic configs can too.
void validate_config(const RunConfig& config);

}  // namespace seird
