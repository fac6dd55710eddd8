// seird: simulates a four-compartment epidemic reaction-diffusion system with
// population-dependent diffusivity via a semi-implicit sweep, and verifies the
// scheme's sign, ordering and boundedness guarantees on the fly.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seird/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SEIRD reaction-diffusion solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid_path, run_dir;
  std::vector<int> taus;

  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory override");

  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  sweep->add_option("config", config_path, "base config file")->required();
  sweep->add_option("--grid", grid_path, "sweep grid file (key = v1, v2, ...)")->required();
  sweep->add_option("--out", out_dir, "output directory override");

  auto* converge = app.add_subcommand("converge", "time-refinement study");
  converge->add_option("config", config_path, "config file")->required();
  converge->add_option("--taus", taus, "step counts, e.g. 16,32,64,128")
      ->required()
      ->delimiter(',');
  converge->add_option("--out", out_dir, "output directory override");

  auto* verify = app.add_subcommand("verify", "re-check a completed run directory");
  verify->add_option("rundir", run_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 1 = parse failure, matching config errors
  }

  if (run->parsed()) return seird::cmd_run(config_path, out_dir);
  if (sweep->parsed()) return seird::cmd_sweep(config_path, grid_path, out_dir);
  if (converge->parsed()) return seird::cmd_converge(config_path, taus, out_dir);
  return seird::cmd_verify(run_dir);
}
