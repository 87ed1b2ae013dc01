#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinfilm/energy.hpp"
#include "thinfilm/optim.hpp"
#include "thinfilm/scenario.hpp"

namespace thinfilm {

struct RunOptions {
  std::string out_dir = "thinfilm_out";
  int snapshot_every = 0;  // 0 picks ceil(n_steps / 100)
  bool mirror = false;
  unsigned seed = 42;
};

/// What a run leaves behind besides its artifact files.
struct RunSummary {
  std::string scenario_name;
  std::string mode;
  std::string termination;
  std::optional<double> final_cost;
  std::optional<double> final_grad_norm;
  std::optional<double> final_linf_error;
  std::optional<double> max_linf_error;
  double mass_drift = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Initial data and target resolved from a scenario (running any steady
/// pre-solves the specs call for).
struct ResolvedScenario {
  Mesh mesh;
  Field h0, s0, hbar;
  std::vector<std::string> warnings;
};

ResolvedScenario resolve_scenario(const Scenario& scenario, bool need_target);

/// Control problem over the scenario's control grid.
ControlProblem make_control_problem(const Scenario& scenario,
                                    const ResolvedScenario& resolved);

/// Uncontrolled run writing snapshots and summary.json.
RunSummary run_forward_scenario(const Scenario& scenario, const RunOptions& opts);

/// Gradient descent run writing optim.csv, snapshots of the optimal
/// trajectory, and summary.json.
RunSummary run_optimize_scenario(const Scenario& scenario, const RunOptions& opts);

/// Forward run with the energy monitor; writes energy.csv. Requires a
/// positive damping coefficient.
RunSummary run_energy_check(const Scenario& scenario, const RunOptions& opts);

struct GradCheckReport {
  std::vector<double> errors;      // one per direction
  double max_error = 0.0;
  bool pass = false;               // max_error < 1e-3
  double delta = 0.0;
  unsigned seed = 0;
};

/// Compares the adjoint gradient with central differences of the reduced cost
/// along random directions.
GradCheckReport grad_check(const Scenario& scenario, int n_dirs, double delta,
                           unsigned seed);
GradCheckReport grad_check_problem(const ControlProblem& problem, int n_dirs,
                                   double delta, unsigned seed);

/// Resolves the scenario's target and writes it as a two-column CSV.
/// Returns any warnings from the pre-runs (e.g. unmet steadiness).
std::vector<std::string> write_target_file(const Scenario& scenario,
                                           const std::string& path);

/// One time level as CSV with header x,h,s,H,mu,f. With mirror, rows for
/// x in [-L, 0) reflect those of (0, L].
void write_snapshot(const std::string& path, const Mesh& mesh,
                    std::span<const double> h, std::span<const double> s,
                    std::span<const double> mu, std::span<const double> f,
                    bool mirror);

/// Two-column field file (x, value) on the mesh nodes.
void write_field_csv(const std::string& path, const Mesh& mesh,
                     std::span<const double> values);
Field load_field_csv(const std::string& path, const Mesh& mesh);

std::string summary_to_json(const RunSummary& summary, const Scenario& scenario);
void write_summary(const std::string& path, const RunSummary& summary,
                   const Scenario& scenario);

}  // namespace thinfilm
