#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seird/interp.hpp"
#include "seird/stepper.hpp"

namespace seird {

// Command bodies behind the executable. Each returns a process exit status:
// 0 success, 1 config/parse failure, 2 solver failure, 3 invariant violation.
int cmd_run(const std::string& config_path, const std::string& out_override);
int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out_override);
int cmd_converge(const std::string& config_path, const std::vector<int>& step_counts,
                 const std::string& out_override);
int cmd_verify(const std::string& run_dir);

// Plumbing shared by the commands and the tests.
void write_run_outputs(const RunConfig& config, const Trajectory& trajectory,
                       const std::string& dir);
std::string totals_csv(const Trajectory& trajectory);
std::string energy_csv(const Trajectory& trajectory);
std::string study_csv(const StudyTable& table);

using Overrides = std::vector<std::pair<std::string, std::string>>;
RunConfig apply_overrides(const RunConfig& base, const Overrides& overrides);

// Cartesian sweep grid: `key = v1, v2, ...` per line, `#` comments.
std::vector<Overrides> parse_sweep_grid(const std::string& text);

}  // namespace seird
