#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/runner.hpp"
#include "thinfilm/scenario.hpp"

namespace {

using namespace thinfilm;

void print_summary(const RunSummary& summary) {
  std::cout << summary.scenario_name << " [" << summary.mode
            << "]: " << summary.termination;
  if (summary.final_cost) std::cout << "  J = " << *summary.final_cost;
  if (summary.final_grad_norm) {
    std::cout << "  |grad J| = " << *summary.final_grad_norm;
  }
  if (summary.final_linf_error) {
    std::cout << "  linf error = " << *summary.final_linf_error;
  }
  std::cout << "  mass drift = " << summary.mass_drift << "\n";
  for (const auto& w : summary.warnings) std::cout << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of thin-film flow over a flexible substrate"};
  app.require_subcommand(1);

  RunOptions opts;
  app.add_option("--out-dir", opts.out_dir, "Artifact directory");
  app.add_option("--snapshot-every", opts.snapshot_every,
                 "Snapshot cadence in steps (0 = about 100 snapshots)");
  app.add_flag("--mirror", opts.mirror,
               "Mirror snapshots symmetrically onto [-L, L]");
  app.add_option("--seed", opts.seed, "Seed for random gradient-check directions");

  std::string cfg_path;
  std::string scenario_name;
  std::string mode = "optimize";
  std::string out_file = "target.csv";
  int n_dirs = 10;
  double delta = 1e-5;
  bool dump_config = false;

  auto* cmd_forward = app.add_subcommand("forward", "Uncontrolled run from a config file");
  cmd_forward->add_option("config", cfg_path, "Config file")->required();

  auto* cmd_optimize = app.add_subcommand("optimize", "Gradient-descent run from a config file");
  cmd_optimize->add_option("config", cfg_path, "Config file")->required();

  auto* cmd_scenario = app.add_subcommand("scenario", "Run a built-in experiment");
  cmd_scenario->add_option("name", scenario_name, "Scenario name")->required();
  cmd_scenario->add_option("--mode", mode, "forward | optimize")
      ->check(CLI::IsMember({"forward", "optimize"}));
  cmd_scenario->add_flag("--dump-config", dump_config,
                         "Print the scenario config and exit");

  auto* cmd_grad = app.add_subcommand("grad-check", "Adjoint vs finite-difference gradient check");
  cmd_grad->add_option("config", cfg_path, "Config file")->required();
  cmd_grad->add_option("--dirs", n_dirs, "Number of random directions");
  cmd_grad->add_option("--delta", delta, "Central-difference step");

  auto* cmd_energy = app.add_subcommand("energy-check", "Forward run with the energy monitor");
  cmd_energy->add_option("config", cfg_path, "Config file")->required();

  auto* cmd_target = app.add_subcommand("make-target", "Resolve and export the target profile");
  cmd_target->add_option("config", cfg_path, "Config file")->required();
  cmd_target->add_option("-o,--output", out_file, "Output CSV path");

  auto* cmd_list = app.add_subcommand("list", "List built-in scenarios");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_forward->parsed()) {
      print_summary(run_forward_scenario(load_scenario(cfg_path), opts));
    } else if (cmd_optimize->parsed()) {
      print_summary(run_optimize_scenario(load_scenario(cfg_path), opts));
    } else if (cmd_scenario->parsed()) {
      const Scenario s = builtin_scenario(scenario_name);
      if (dump_config) {
        std::cout << serialize_scenario(s);
        return 0;
      }
      print_summary(mode == "forward" ? run_forward_scenario(s, opts)
                                      : run_optimize_scenario(s, opts));
    } else if (cmd_grad->parsed()) {
      const GradCheckReport report =
          grad_check(load_scenario(cfg_path), n_dirs, delta, opts.seed);
      for (std::size_t d = 0; d < report.errors.size(); ++d) {
        std::printf("direction %2zu: relative error %.3e\n", d, report.errors[d]);
      }
      std::printf("max relative error %.3e (delta %.1e, seed %u): %s\n",
                  report.max_error, report.delta, report.seed,
                  report.pass ? "PASS" : "FAIL");
      return report.pass ? 0 : 1;
    } else if (cmd_energy->parsed()) {
      print_summary(run_energy_check(load_scenario(cfg_path), opts));
    } else if (cmd_target->parsed()) {
      const auto warnings = write_target_file(load_scenario(cfg_path), out_file);
      for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
      std::cout << "target written to " << out_file << "\n";
    } else if (cmd_list->parsed()) {
      for (const auto& name : scenario_names()) std::cout << name << "\n";
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
