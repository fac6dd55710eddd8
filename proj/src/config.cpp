#include "seird/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "seird/io.hpp"

namespace seird {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  bool consumed = false;
};

using RawMap = std::map<std::string, RawValue>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const RawValue& rv, const std::string& key) {
  const std::string t = trim(rv.text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(rv.line, key, key + ": not a number: '" + rv.text + "'");
  return x;
}

int parse_int(const RawValue& rv, const std::string& key) {
  const std::string t = trim(rv.text);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(rv.line, key, key + ": not an integer: '" + rv.text + "'");
  return x;
}

bool parse_bool(const RawValue& rv, const std::string& key) {
  const std::string t = trim(rv.text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(rv.line, key, key + ": not a boolean: '" + rv.text + "'");
}

class Reader {
 public:
  explicit Reader(RawMap& raw) : raw_(raw) {}

  bool has(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return false;
    it->second.consumed = true;
    return true;
  }
  double number(const std::string& key, double fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    it->second.consumed = true;
    return parse_double(it->second, key);
  }
  int integer(const std::string& key, int fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    it->second.consumed = true;
    return parse_int(it->second, key);
  }
  bool boolean(const std::string& key, bool fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    it->second.consumed = true;
    return parse_bool(it->second, key);
  }
  std::string word(const std::string& key, const std::string& fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    it->second.consumed = true;
    return trim(it->second.text);
  }
  // Per-axis list; a single entry is broadcast to `count` axes.
  template <typename T, std::size_t N>
  void axis_list(const std::string& key, std::array<T, N>& out, int count,
                 bool integers) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return;
    it->second.consumed = true;
    const auto toks = split_list(trim(it->second.text));
    if (toks.empty() || static_cast<int>(toks.size()) > count)
      throw ConfigError(it->second.line, key,
                        key + ": expected 1.." + std::to_string(count) + " entries");
    for (int a = 0; a < count; ++a) {
      const RawValue item{toks[std::min<std::size_t>(a, toks.size() - 1)], it->second.line};
      out[a] = integers ? static_cast<T>(parse_int(item, key))
                        : static_cast<T>(parse_double(item, key));
    }
  }
  void fail_unknown() const {
    for (const auto& [key, rv] : raw_)
      if (!rv.consumed) throw ConfigError(rv.line, key, "unknown key: " + key);
  }

 private:
  RawMap& raw_;
};

void read_init_spec(Reader& r, const std::string& prefix, InitSpec& spec, int dim) {
  const std::string kind = r.word(prefix + ".preset", "");
  if (!kind.empty()) {
    if (kind == "constant") spec.preset = InitSpec::Preset::constant;
    else if (kind == "gaussian") spec.preset = InitSpec::Preset::gaussian;
    else if (kind == "rectangle") spec.preset = InitSpec::Preset::rectangle;
    else if (kind == "raster") spec.preset = InitSpec::Preset::raster;
    else throw ConfigError(0, prefix + ".preset", prefix + ".preset: unknown preset " + kind);
  }
  spec.value = r.number(prefix + ".value", spec.value);
  r.axis_list(prefix + ".center", spec.center, dim, false);
  spec.width = r.number(prefix + ".width", spec.width);
  spec.amplitude = r.number(prefix + ".amplitude", spec.amplitude);
  spec.floor_value = r.number(prefix + ".floor", spec.floor_value);
  r.axis_list(prefix + ".lo", spec.lo, dim, false);
  r.axis_list(prefix + ".hi", spec.hi, dim, false);
  spec.inside = r.number(prefix + ".inside", spec.inside);
  spec.outside = r.number(prefix + ".outside", spec.outside);
  spec.path = r.word(prefix + ".path", spec.path);
  if (spec.preset == InitSpec::Preset::gaussian && !(spec.width > 0.0))
    throw ConfigError(0, prefix + ".width", prefix + ".width must be positive");
  if (spec.preset == InitSpec::Preset::raster && spec.path.empty())
    throw ConfigError(0, prefix + ".path", prefix + ".path required for raster preset");
}

// Every field is written, not just the preset-relevant ones, so that
// parse(emit(c)) reproduces c exactly.
void emit_init_spec(std::ostringstream& out, const std::string& prefix,
                    const InitSpec& spec, int dim) {
  auto axis = [&](const std::array<double, 3>& xs) {
    std::string s;
    for (int a = 0; a < dim; ++a) s += (a ? " " : "") + format_double(xs[a]);
    return s;
  };
  const char* names[] = {"constant", "gaussian", "rectangle", "raster"};
  out << prefix << ".preset = " << names[static_cast<int>(spec.preset)] << "\n";
  out << prefix << ".value = " << format_double(spec.value) << "\n";
  out << prefix << ".center = " << axis(spec.center) << "\n";
  out << prefix << ".width = " << format_double(spec.width) << "\n";
  out << prefix << ".amplitude = " << format_double(spec.amplitude) << "\n";
  out << prefix << ".floor = " << format_double(spec.floor_value) << "\n";
  out << prefix << ".lo = " << axis(spec.lo) << "\n";
  out << prefix << ".hi = " << axis(spec.hi) << "\n";
  out << prefix << ".inside = " << format_double(spec.inside) << "\n";
  out << prefix << ".outside = " << format_double(spec.outside) << "\n";
  if (!spec.path.empty()) out << prefix << ".path = " << spec.path << "\n";
}

}  // namespace

Mesh build_mesh_from(const MeshSpec& spec) {
  return build_mesh(spec.dim, spec.cells, spec.lengths);
}

Field build_initial_field(const Mesh& mesh, const InitSpec& spec) {
  Field f(mesh);
  switch (spec.preset) {
    case InitSpec::Preset::constant:
      for (int c = 0; c < mesh.cell_count(); ++c) f[c] = spec.value;
      break;
    case InitSpec::Preset::gaussian:
      for (int c = 0; c < mesh.cell_count(); ++c) {
        double r2 = 0.0;
        for (int a = 0; a < mesh.dim(); ++a) {
          const double d = mesh.center(c, a) - spec.center[a];
          r2 += d * d;
        }
        f[c] = spec.floor_value +
               spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
      }
      break;
    case InitSpec::Preset::rectangle:
      for (int c = 0; c < mesh.cell_count(); ++c) {
        bool in = true;
        for (int a = 0; a < mesh.dim(); ++a) {
          const double x = mesh.center(c, a);
          in = in && x >= spec.lo[a] && x <= spec.hi[a];
        }
        f[c] = in ? spec.inside : spec.outside;
      }
      break;
    case InitSpec::Preset::raster: {
      const SnapshotData data = read_field_snapshot(spec.path);
      if (data.cells != mesh.cells())
        throw ConfigError(0, "raster",
                          "snapshot extents do not match the mesh: " + spec.path);
      f.v = data.values;
      break;
    }
  }
  return f;
}

void validate_config(const RunConfig& config) {
  config.params.validate();
  config.nonlinearity.validate();
  if (!(config.T > 0.0)) throw ConfigError(0, "time.T", "time.T must be positive");
  if (config.N < 1) throw ConfigError(0, "time.N", "time.N must be a positive step count");
  const TauCheck tc = validate_tau(config.params, config.tau());
  if (!tc.admissible)
    throw ConfigError(0, "time.N", "tau = T/N inadmissible: " + tc.reason);
  if (!(config.tol > 0.0)) throw ConfigError(0, "tol", "tol must be positive");
  if (config.output_every < 1)
    throw ConfigError(0, "output.every", "output.every must be >= 1");
  if (!(config.init_d >= 0.0))
    throw ConfigError(0, "init.d.value", "initial deceased must be nonnegative");
  if (!(config.probe_gronwall_c > 0.0))
    throw ConfigError(0, "probe.gronwall_c", "probe.gronwall_c must be positive");
  if (!(config.probe_delta >= 0.0))
    throw ConfigError(0, "probe.delta", "probe.delta must be nonnegative");
  if (config.probe_target != "n" && config.probe_target != "s" &&
      config.probe_target != "i" && config.probe_target != "h")
    throw ConfigError(0, "probe.target", "probe.target must be one of n, s, i, h");

  const Mesh mesh = build_mesh_from(config.mesh);
  const Field n0 = build_initial_field(mesh, config.init_n);
  const Field s0 = build_initial_field(mesh, config.init_s);
  const Field i0 = build_initial_field(mesh, config.init_i);
  const Field h0 = build_initial_field(mesh, config.init_h);
  if (!field_finite(n0) || !field_finite(s0) || !field_finite(i0) || !field_finite(h0))
    throw ConfigError(0, "init", "initial fields must be finite");
  if (!(field_min(n0) > 0.0))
    throw ConfigError(0, "init.n", "initial population must be positive everywhere");
  if (field_min(s0) < 0.0)
    throw ConfigError(0, "init.s", "initial susceptible must be nonnegative");
  if (field_min(i0) < 0.0)
    throw ConfigError(0, "init.i", "initial infected must be nonnegative");
  for (int c = 0; c < mesh.cell_count(); ++c)
    if (h0[c] < s0[c])
      throw ConfigError(0, "init.h", "initial data must satisfy h0 >= s0 everywhere");
}

RunConfig parse_config(const std::string& text) {
  RawMap raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "", "empty key");
    if (raw.count(key))
      throw ConfigError(lineno, key, "duplicate key: " + key);
    raw[key] = RawValue{value, lineno};
  }

  Reader r(raw);
  RunConfig cfg;
  cfg.mesh.dim = r.integer("mesh.dim", cfg.mesh.dim);
  r.axis_list("mesh.cells", cfg.mesh.cells, cfg.mesh.dim, true);
  r.axis_list("mesh.lengths", cfg.mesh.lengths, cfg.mesh.dim, false);
  cfg.T = r.number("time.T", cfg.T);
  cfg.N = r.integer("time.N", cfg.N);

  cfg.params.normalized = r.boolean("params.normalized", cfg.params.normalized);
  cfg.params.alpha = r.number("params.alpha", cfg.params.alpha);
  cfg.params.mu = r.number("params.mu", cfg.params.mu);
  cfg.params.beta_i = r.number("params.beta_i", cfg.params.beta_i);
  cfg.params.beta_e = r.number("params.beta_e", cfg.params.beta_e);
  cfg.params.sigma = r.number("params.sigma", cfg.params.sigma);
  cfg.params.phi_e = r.number("params.phi_e", cfg.params.phi_e);
  cfg.params.phi_r = r.number("params.phi_r", cfg.params.phi_r);
  cfg.params.phi_d = r.number("params.phi_d", cfg.params.phi_d);

  const std::string kk = r.word("kappa.kind", "");
  if (!kk.empty()) {
    if (kk == "constant") cfg.nonlinearity.kappa_kind = Nonlinearity::KappaKind::constant;
    else if (kk == "linear") cfg.nonlinearity.kappa_kind = Nonlinearity::KappaKind::linear;
    else if (kk == "affine") cfg.nonlinearity.kappa_kind = Nonlinearity::KappaKind::affine;
    else throw ConfigError(0, "kappa.kind", "kappa.kind: unknown preset " + kk);
  }
  cfg.nonlinearity.kappa_value = r.number("kappa.value", cfg.nonlinearity.kappa_value);
  cfg.nonlinearity.kappa_slope = r.number("kappa.slope", cfg.nonlinearity.kappa_slope);
  cfg.nonlinearity.kappa_offset = r.number("kappa.offset", cfg.nonlinearity.kappa_offset);

  const std::string ak = r.word("A.kind", "");
  if (!ak.empty()) {
    if (ak == "constant") cfg.nonlinearity.a_kind = Nonlinearity::AKind::constant;
    else if (ak == "saturating") cfg.nonlinearity.a_kind = Nonlinearity::AKind::saturating;
    else throw ConfigError(0, "A.kind", "A.kind: unknown preset " + ak);
  }
  cfg.nonlinearity.a_value = r.number("A.value", cfg.nonlinearity.a_value);
  cfg.nonlinearity.a_threshold = r.number("A.threshold", cfg.nonlinearity.a_threshold);

  read_init_spec(r, "init.n", cfg.init_n, cfg.mesh.dim);
  read_init_spec(r, "init.s", cfg.init_s, cfg.mesh.dim);
  read_init_spec(r, "init.i", cfg.init_i, cfg.mesh.dim);
  read_init_spec(r, "init.h", cfg.init_h, cfg.mesh.dim);
  cfg.init_d = r.number("init.d.value", cfg.init_d);

  cfg.mollify = r.boolean("mollify", cfg.mollify);
  cfg.tol = r.number("tol", cfg.tol);
  cfg.output_dir = r.word("output.dir", cfg.output_dir);
  cfg.output_every = r.integer("output.every", cfg.output_every);
  cfg.probe_gronwall_c = r.number("probe.gronwall_c", cfg.probe_gronwall_c);
  cfg.probe_delta = r.number("probe.delta", cfg.probe_delta);
  cfg.probe_target = r.word("probe.target", cfg.probe_target);

  r.fail_unknown();
  validate_config(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "mesh.dim = " << cfg.mesh.dim << "\n";
  out << "mesh.cells =";
  for (int a = 0; a < cfg.mesh.dim; ++a) out << " " << cfg.mesh.cells[a];
  out << "\nmesh.lengths =";
  for (int a = 0; a < cfg.mesh.dim; ++a) out << " " << format_double(cfg.mesh.lengths[a]);
  out << "\ntime.T = " << format_double(cfg.T) << "\n";
  out << "time.N = " << cfg.N << "\n";
  out << "params.normalized = " << (cfg.params.normalized ? "true" : "false") << "\n";
  out << "params.alpha = " << format_double(cfg.params.alpha) << "\n";
  out << "params.mu = " << format_double(cfg.params.mu) << "\n";
  if (!cfg.params.normalized) {
    out << "params.beta_i = " << format_double(cfg.params.beta_i) << "\n";
    out << "params.beta_e = " << format_double(cfg.params.beta_e) << "\n";
    out << "params.sigma = " << format_double(cfg.params.sigma) << "\n";
    out << "params.phi_e = " << format_double(cfg.params.phi_e) << "\n";
    out << "params.phi_r = " << format_double(cfg.params.phi_r) << "\n";
    out << "params.phi_d = " << format_double(cfg.params.phi_d) << "\n";
  }
  switch (cfg.nonlinearity.kappa_kind) {
    case Nonlinearity::KappaKind::constant:
      out << "kappa.kind = constant\n";
      out << "kappa.value = " << format_double(cfg.nonlinearity.kappa_value) << "\n";
      break;
    case Nonlinearity::KappaKind::linear:
      out << "kappa.kind = linear\n";
      break;
    case Nonlinearity::KappaKind::affine:
      out << "kappa.kind = affine\n";
      out << "kappa.slope = " << format_double(cfg.nonlinearity.kappa_slope) << "\n";
      out << "kappa.offset = " << format_double(cfg.nonlinearity.kappa_offset) << "\n";
      break;
  }
  switch (cfg.nonlinearity.a_kind) {
    case Nonlinearity::AKind::constant:
      out << "A.kind = constant\n";
      out << "A.value = " << format_double(cfg.nonlinearity.a_value) << "\n";
      break;
    case Nonlinearity::AKind::saturating:
      out << "A.kind = saturating\n";
      out << "A.threshold = " << format_double(cfg.nonlinearity.a_threshold) << "\n";
      break;
  }
  emit_init_spec(out, "init.n", cfg.init_n, cfg.mesh.dim);
  emit_init_spec(out, "init.s", cfg.init_s, cfg.mesh.dim);
  emit_init_spec(out, "init.i", cfg.init_i, cfg.mesh.dim);
  emit_init_spec(out, "init.h", cfg.init_h, cfg.mesh.dim);
  out << "init.d.value = " << format_double(cfg.init_d) << "\n";
  out << "mollify = " << (cfg.mollify ? "true" : "false") << "\n";
  out << "tol = " << format_double(cfg.tol) << "\n";
  out << "output.dir = " << cfg.output_dir << "\n";
  out << "output.every = " << cfg.output_every << "\n";
  out << "probe.gronwall_c = " << format_double(cfg.probe_gronwall_c) << "\n";
  out << "probe.delta = " << format_double(cfg.probe_delta) << "\n";
  out << "probe.target = " << cfg.probe_target << "\n";
  return out.str();
}

}  // namespace seird
