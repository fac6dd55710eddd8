#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "seird/cli.hpp"
#include "seird/io.hpp"

using namespace seird;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("seird_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kSmallConfig =
    "# small homogeneous epidemic\n"
    "mesh.dim = 1\n"
    "mesh.cells = 6\n"
    "time.T = 0.5\n"
    "time.N = 8\n"
    "params.alpha = 0.8\n"
    "params.mu = 1.0\n"
    "init.n.preset = constant\n"
    "init.n.value = 2.0\n"
    "init.s.preset = constant\n"
    "init.s.value = 1.2\n"
    "init.i.preset = constant\n"
    "init.i.value = 0.3\n"
    "init.h.preset = constant\n"
    "init.h.value = 1.5\n";

}  // namespace

TEST_CASE("parse: minimal config fills defaults") {
  const RunConfig cfg = parse_config("params.alpha = 0.5\nparams.mu = 1.0\n");
  CHECK(cfg.mesh.dim == 1);
  CHECK(cfg.N == 16);
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.params.alpha == 0.5);
  CHECK(cfg.params.normalized);
  CHECK(cfg.output_every == 1);
}

TEST_CASE("parse: errors carry line numbers and offending keys") {
  try {
    parse_config("mesh.dim = 1\nnot a key value\n");
    FAIL("expected parse error");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }

  try {
    parse_config("mesh.dim = 1\nmesh.bogus = 3\n");
    FAIL("expected unknown-key error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "mesh.bogus");
    CHECK(e.line == 2);
  }

  try {
    parse_config("time.N = 0\n");
    FAIL("expected step-count error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "time.N");
  }

  try {
    parse_config("init.n.preset = constant\ninit.n.value = 0\n");
    FAIL("expected positivity error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "init.n");
    CHECK(std::string(e.what()).find("positive") != std::string::npos);
  }

  try {
    parse_config("mesh.dim = 1\nmesh.dim = 2\n");
    FAIL("expected duplicate-key error");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }

  // ordering violation h0 < s0
  CHECK_THROWS_AS(parse_config("init.s.value = 2.0\ninit.h.value = 1.0\n"), ConfigError);
  // inadmissible step: alpha - mu = 1 caps tau at 0.5, T/N = 1.0
  CHECK_THROWS_AS(parse_config("params.alpha = 2.0\nparams.mu = 1.0\ntime.N = 1\n"),
                  ConfigError);
}

TEST_CASE("parse/emit round-trip on representative configs") {
  RunConfig a = parse_config(kSmallConfig);
  CHECK(parse_config(emit_config(a)) == a);

  RunConfig b;
  b.mesh.dim = 2;
  b.mesh.cells = {12, 8, 1};
  b.mesh.lengths = {2.0, 1.0, 1.0};
  b.T = 0.25;
  b.N = 8;
  b.params = normalized_params(0.5, 0.75);
  b.nonlinearity.kappa_kind = Nonlinearity::KappaKind::affine;
  b.nonlinearity.kappa_slope = 0.4;
  b.nonlinearity.kappa_offset = 0.3;
  b.nonlinearity.a_kind = Nonlinearity::AKind::saturating;
  b.nonlinearity.a_threshold = 0.5;
  b.init_n = InitSpec{InitSpec::Preset::gaussian, 0.0, {0.5, 0.25, 0.5}, 0.2, 1.0, 1.0};
  b.init_s = InitSpec{InitSpec::Preset::rectangle, 0.0, {0.5, 0.5, 0.5}, 0.1, 1.0, 0.0,
                      {0.2, 0.2, 0.0}, {0.8, 0.8, 1.0}, 0.5, 0.1};
  b.init_i = InitSpec{InitSpec::Preset::constant, 0.05};
  b.init_h = InitSpec{InitSpec::Preset::constant, 0.9};
  b.mollify = true;
  b.tol = 1e-11;
  b.output_every = 4;
  CHECK(parse_config(emit_config(b)) == b);

  RunConfig c = parse_config(kSmallConfig);
  c.params.normalized = false;
  c.params.phi_d = 0.3;
  c.params.sigma = 0.7;
  c.params.phi_e = 0.3;
  CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("parse: normalized mode rejects conflicting rate keys") {
  CHECK_THROWS_AS(parse_config("params.sigma = 0.5\n"), ConfigError);
  CHECK_NOTHROW(parse_config("params.normalized = false\nparams.sigma = 0.5\n"));
}

TEST_CASE("snapshot: write/read round-trip with a 64-byte header") {
  TempDir tmp("snapshot");
  const Mesh m = build_mesh(2, {5, 3, 1}, {1.0, 1.0, 1.0});
  oracle::Rng rng(107);
  const Field f = oracle::random_field(m, rng, -2.0, 2.0);
  const std::string path = (tmp.path / "field.fld").string();
  write_field_snapshot(path, f);

  std::ifstream in(path, std::ios::binary);
  std::string header(64, '\0');
  in.read(header.data(), 64);
  CHECK(header.substr(0, 14) == "SEIRD-FIELD v1");
  CHECK(header[63] == '\n');
  CHECK(fs::file_size(path) == 64 + 15 * sizeof(double));

  const SnapshotData data = read_field_snapshot(path);
  CHECK(data.dim == 2);
  CHECK(data.cells == std::array<int, 3>{5, 3, 1});
  for (int c = 0; c < 15; ++c) CHECK(data.values[c] == f[c]);
}

TEST_CASE("raster preset: feeds a snapshot back as initial data") {
  TempDir tmp("raster");
  const Mesh m = build_mesh(1, {6, 1, 1}, {1.0, 1.0, 1.0});
  Field f(m);
  for (int c = 0; c < 6; ++c) f[c] = 1.0 + 0.1 * c;
  const std::string path = (tmp.path / "n0.fld").string();
  write_field_snapshot(path, f);

  InitSpec spec;
  spec.preset = InitSpec::Preset::raster;
  spec.path = path;
  const Field g = build_initial_field(m, spec);
  for (int c = 0; c < 6; ++c) CHECK(g[c] == f[c]);

  const Mesh other = build_mesh(1, {8, 1, 1}, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS(build_initial_field(other, spec), ConfigError);
}

TEST_CASE("sweep grid: cartesian product in file order") {
  const auto points = parse_sweep_grid(
      "params.alpha = 0.5, 0.8\n"
      "# comment\n"
      "time.N = 8, 16, 32\n");
  REQUIRE(points.size() == 6);
  CHECK(points[0][0].second == "0.5");
  CHECK(points[0][1].second == "8");
  CHECK(points[5][0].second == "0.8");
  CHECK(points[5][1].second == "32");
  CHECK_THROWS_AS(parse_sweep_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_sweep_grid("params.alpha =\n"), ConfigError);
}

TEST_CASE("apply_overrides: replaces existing keys and appends new ones") {
  const RunConfig base = parse_config(kSmallConfig);
  const RunConfig patched =
      apply_overrides(base, {{"params.alpha", "0.5"}, {"kappa.value", "2.0"}});
  CHECK(patched.params.alpha == 0.5);
  CHECK(patched.nonlinearity.kappa_value == 2.0);
  CHECK(patched.N == base.N);
}

TEST_CASE("cmd_run + cmd_verify: a completed run directory verifies clean") {
  TempDir tmp("runverify");
  const fs::path cfg_path = tmp.path / "case.seird";
  const fs::path out_dir = tmp.path / "out";
  write_file(cfg_path, std::string(kSmallConfig) + "output.every = 4\n");

  CHECK(cmd_run(cfg_path.string(), out_dir.string()) == 0);
  CHECK(fs::exists(out_dir / "totals.csv"));
  CHECK(fs::exists(out_dir / "energy.csv"));
  CHECK(fs::exists(out_dir / "config.seird"));
  CHECK(fs::exists(out_dir / "n_000000.fld"));
  CHECK(fs::exists(out_dir / "n_000008.fld"));
  CHECK(!fs::exists(out_dir / "n_000001.fld"));

  CHECK(cmd_verify(out_dir.string()) == 0);

  // tampering with the recorded totals must fail verification
  std::ofstream tamper(out_dir / "totals.csv", std::ios::app);
  tamper << "junk\n";
  tamper.close();
  CHECK(cmd_verify(out_dir.string()) == 3);

  CHECK(cmd_run((tmp.path / "missing.seird").string(), out_dir.string()) == 1);
}

TEST_CASE("cmd_run is deterministic: identical configs give identical bytes") {
  TempDir tmp("determinism");
  const fs::path cfg_path = tmp.path / "case.seird";
  write_file(cfg_path, kSmallConfig);
  CHECK(cmd_run(cfg_path.string(), (tmp.path / "a").string()) == 0);
  CHECK(cmd_run(cfg_path.string(), (tmp.path / "b").string()) == 0);
  std::ifstream fa(tmp.path / "a" / "totals.csv"), fb(tmp.path / "b" / "totals.csv");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
}

TEST_CASE("cmd_sweep: one directory per point plus a manifest") {
  TempDir tmp("sweep");
  const fs::path cfg_path = tmp.path / "base.seird";
  const fs::path grid_path = tmp.path / "grid.txt";
  write_file(cfg_path, kSmallConfig);
  write_file(grid_path, "params.alpha = 0.6, 0.8\ntime.N = 8, 16\n");
  setenv("SEIRD_THREADS", "2", 1);
  CHECK(cmd_sweep(cfg_path.string(), grid_path.string(), (tmp.path / "sw").string()) == 0);
  CHECK(fs::exists(tmp.path / "sw" / "sweep_manifest.csv"));
  for (int c = 0; c < 4; ++c)
    CHECK(fs::exists(tmp.path / "sw" / ("case_" + std::string(5, '0') + std::to_string(c)) /
                     "totals.csv"));
}

TEST_CASE("cmd_converge: writes the study table") {
  TempDir tmp("converge");
  const fs::path cfg_path = tmp.path / "case.seird";
  write_file(cfg_path, kSmallConfig);
  CHECK(cmd_converge(cfg_path.string(), {8, 16, 32}, (tmp.path / "cv").string()) == 0);
  std::ifstream in(tmp.path / "cv" / "study.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "tau,dist_n,dist_s,dist_i,dist_h,order_estimate");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}
