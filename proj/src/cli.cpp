#include "seird/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "seird/diagnostics.hpp"
#include "seird/io.hpp"

namespace seird {

namespace fs = std::filesystem;

namespace {

int classify(const std::exception_ptr& cause) {
  try {
    std::rethrow_exception(cause);
  } catch (const InvariantViolation&) {
    return 3;
  } catch (...) {
    return 2;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const SimulationError& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return e.cause ? classify(e.cause) : 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SolverError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string step_tag(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", k);
  return buf;
}

int sweep_thread_cap() {
  if (const char* env = std::getenv("SEIRD_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

std::string totals_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "step,time,n_total,n_min,n_max,s_total,s_min,s_max,i_total,i_min,i_max,"
         "h_total,h_min,h_max,d_total\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const State& st = traj.states[k];
    out << st.k << "," << format_double(st.t);
    for (const Field* f : {&st.n, &st.s, &st.i, &st.h})
      out << "," << format_double(field_integral(*f)) << "," << format_double(field_min(*f))
          << "," << format_double(field_max(*f));
    out << "," << format_double(field_integral(traj.deceased[k])) << "\n";
  }
  return out.str();
}

std::string energy_csv(const Trajectory& traj) {
  const EnergyReport rep = monitor_energy(traj);
  std::ostringstream out;
  out << "unknown,max_h_sq,tau_sum_v_sq,incr_sum_h_sq,dual_deriv_sq\n";
  const char* names[] = {"n", "s", "i", "h"};
  for (int q = 0; q < 4; ++q) {
    const EnergyEntry& e = rep.by_index(q);
    out << names[q] << "," << format_double(e.max_h_sq) << ","
        << format_double(e.tau_sum_v_sq) << "," << format_double(e.incr_sum_h_sq) << ","
        << format_double(e.dual_deriv_sq) << "\n";
  }
  return out.str();
}

std::string study_csv(const StudyTable& table) {
  std::ostringstream out;
  out << "tau,dist_n,dist_s,dist_i,dist_h,order_estimate\n";
  for (const StudyRow& r : table.rows)
    out << format_double(r.tau) << "," << format_double(r.dist_n) << ","
        << format_double(r.dist_s) << "," << format_double(r.dist_i) << ","
        << format_double(r.dist_h) << "," << format_double(r.order_estimate) << "\n";
  return out.str();
}

void write_run_outputs(const RunConfig& config, const Trajectory& traj,
                       const std::string& dir) {
  fs::create_directories(dir);
  write_text(fs::path(dir) / "config.seird", emit_config(config));
  write_text(fs::path(dir) / "totals.csv", totals_csv(traj));
  write_text(fs::path(dir) / "energy.csv", energy_csv(traj));
  const char* names[] = {"n", "s", "i", "h"};
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const int step = traj.states[k].k;
    if (step % config.output_every != 0 && step != traj.grid.N) continue;
    const State& st = traj.states[k];
    const Field* fields[] = {&st.n, &st.s, &st.i, &st.h};
    for (int q = 0; q < 4; ++q)
      write_field_snapshot(
          (fs::path(dir) / (std::string(names[q]) + "_" + step_tag(step) + ".fld")).string(),
          *fields[q]);
    write_field_snapshot((fs::path(dir) / ("d_" + step_tag(step) + ".fld")).string(),
                         traj.deceased[k]);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  return guarded([&] {
    RunConfig config = load_config_file(config_path);
    if (!out_override.empty()) config.output_dir = out_override;
    const Trajectory traj = run_simulation(config);
    write_run_outputs(config, traj, config.output_dir);
    std::cout << "run complete: " << config.N << " steps on " << traj.mesh->cell_count()
              << " cells -> " << config.output_dir << "\n";
    return 0;
  });
}

RunConfig apply_overrides(const RunConfig& base, const Overrides& overrides) {
  std::istringstream in(emit_config(base));
  std::ostringstream out;
  std::string line;
  std::vector<bool> used(overrides.size(), false);
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    bool replaced = false;
    if (eq != std::string::npos) {
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      for (std::size_t j = 0; j < overrides.size(); ++j)
        if (overrides[j].first == key) {
          out << key << " = " << overrides[j].second << "\n";
          used[j] = replaced = true;
          break;
        }
    }
    if (!replaced) out << line << "\n";
  }
  for (std::size_t j = 0; j < overrides.size(); ++j)
    if (!used[j]) out << overrides[j].first << " = " << overrides[j].second << "\n";
  return parse_config(out.str());
}

std::vector<Overrides> parse_sweep_grid(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError(lineno, "", "sweep grid expects 'key = v1, v2, ...'");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::vector<std::string> values;
    std::string cur;
    for (char ch : line.substr(eq + 1)) {
      if (ch == ',') {
        values.push_back(cur);
        cur.clear();
      } else if (ch != ' ' && ch != '\t' && ch != '\r') {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) values.push_back(cur);
    if (values.empty()) throw ConfigError(lineno, key, "sweep axis has no values");
    axes.emplace_back(key, values);
  }
  if (axes.empty()) throw ConfigError(0, "", "sweep grid is empty");

  std::vector<Overrides> points{{}};
  for (const auto& [key, values] : axes) {
    std::vector<Overrides> next;
    for (const Overrides& partial : points)
      for (const std::string& v : values) {
        Overrides extended = partial;
        extended.emplace_back(key, v);
        next.push_back(std::move(extended));
      }
    points = std::move(next);
  }
  return points;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out_override) {
  return guarded([&] {
    const RunConfig base = load_config_file(config_path);
    const std::string root = out_override.empty() ? base.output_dir : out_override;
    const auto points = parse_sweep_grid(read_text(grid_path));

    // Validate all points up front so a bad grid fails before any work runs.
    std::vector<RunConfig> configs;
    configs.reserve(points.size());
    for (const Overrides& ov : points) configs.push_back(apply_overrides(base, ov));

    fs::create_directories(root);
    std::ostringstream manifest;
    manifest << "case";
    for (const auto& [key, value] : points.front()) manifest << "," << key;
    manifest << "\n";
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      manifest << "case_" << step_tag(static_cast<int>(idx));
      for (const auto& [key, value] : points[idx]) manifest << "," << value;
      manifest << "\n";
    }
    write_text(fs::path(root) / "sweep_manifest.csv", manifest.str());

    std::atomic<std::size_t> cursor{0};
    std::atomic<int> worst{0};
    const int workers =
        std::min<int>(sweep_thread_cap(), static_cast<int>(points.size()));
    auto worker = [&] {
      for (;;) {
        const std::size_t idx = cursor.fetch_add(1);
        if (idx >= points.size()) return;
        const int status = guarded([&] {
          RunConfig cfg = configs[idx];
          cfg.output_dir = (fs::path(root) / ("case_" + step_tag(static_cast<int>(idx)))).string();
          const Trajectory traj = run_simulation(cfg);
          write_run_outputs(cfg, traj, cfg.output_dir);
          return 0;
        });
        int prev = worst.load();
        while (status > prev && !worst.compare_exchange_weak(prev, status)) {
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::cout << "sweep complete: " << points.size() << " cases -> " << root << "\n";
    return worst.load();
  });
}

int cmd_converge(const std::string& config_path, const std::vector<int>& step_counts,
                 const std::string& out_override) {
  return guarded([&] {
    RunConfig config = load_config_file(config_path);
    if (!out_override.empty()) config.output_dir = out_override;
    const StudyTable table = convergence_study(config, step_counts);
    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "study.csv", study_csv(table));
    std::cout << "tau,dist_combined,order_estimate,cauchy_ratio\n";
    for (const StudyRow& r : table.rows)
      std::cout << format_double(r.tau) << "," << format_double(r.dist_combined) << ","
                << format_double(r.order_estimate) << "," << format_double(r.cauchy_ratio)
                << "\n";
    return 0;
  });
}

int cmd_verify(const std::string& run_dir) {
  return guarded([&] {
    const RunConfig config = load_config_file((fs::path(run_dir) / "config.seird").string());
    const Trajectory traj = run_simulation(config);

    int failures = 0;
    const auto violations = verify_bounds(traj, traj.tnl.ledger);
    if (violations.empty()) {
      std::cout << "[ok] bounds: all states inside the a-priori box\n";
    } else {
      ++failures;
      std::cout << "[fail] bounds: " << violations.size() << " violations; first: step "
                << violations.front().step << " cell " << violations.front().cell << " "
                << violations.front().quantity << " = " << violations.front().value << "\n";
    }

    const EnergyReport energy = monitor_energy(traj);
    bool energy_ok = true;
    for (int q = 0; q < 4; ++q) {
      const EnergyEntry& e = energy.by_index(q);
      for (double x : {e.max_h_sq, e.tau_sum_v_sq, e.incr_sum_h_sq, e.dual_deriv_sq})
        energy_ok = energy_ok && std::isfinite(x) && x >= 0.0;
    }
    std::cout << (energy_ok ? "[ok] energy: all monitors finite and nonnegative\n"
                            : "[fail] energy: non-finite or negative monitor\n");
    if (!energy_ok) ++failures;

    bool identities_ok = true;
    for (auto member : {&State::n, &State::s, &State::i, &State::h}) {
      std::vector<Field> samples;
      for (const State& st : traj.states) samples.push_back(st.*member);
      const InterpolantSet set = build_interpolants(std::move(samples), traj.grid.tau());
      for (NormKind space : {NormKind::H, NormKind::V})
        identities_ok =
            identities_ok && verify_interpolant_identities(set, space).all_hold(1e-12);
    }
    std::cout << (identities_ok ? "[ok] interpolants: all identities hold\n"
                                : "[fail] interpolants: identity gap beyond 1e-12\n");
    if (!identities_ok) ++failures;

    const auto balance = population_balance_residuals(traj);
    const double worst = *std::max_element(balance.begin(), balance.end());
    if (worst <= 1e-9) {
      std::cout << "[ok] balance: worst per-step residual " << format_double(worst) << "\n";
    } else {
      ++failures;
      std::cout << "[fail] balance: worst per-step residual " << format_double(worst) << "\n";
    }

    const std::string recorded = read_text(fs::path(run_dir) / "totals.csv");
    if (recorded == totals_csv(traj)) {
      std::cout << "[ok] totals.csv reproduces bit-identically\n";
    } else {
      ++failures;
      std::cout << "[fail] totals.csv differs from the recorded run\n";
    }

    if (failures) {
      std::cout << failures << " verification failures\n";
      throw InvariantViolation("verification failed");
    }
    std::cout << "verification passed\n";
    return 0;
  });
}

}  // namespace seird
