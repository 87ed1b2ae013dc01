#include "thinfilm/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "thinfilm/adjoint.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%06d.csv", step);
  return buf;
}

int snapshot_cadence(const RunOptions& opts, int n_steps) {
  if (opts.snapshot_every > 0) return opts.snapshot_every;
  return (n_steps + 99) / 100;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

double mass_drift_of(const std::vector<double>& mass) {
  if (mass.empty()) return 0.0;
  const double m0 = mass.front();
  double drift = 0.0;
  for (double m : mass) drift = std::max(drift, std::abs(m - m0));
  return drift / std::max(1e-300, std::abs(m0));
}

Field cosine_profile(const Mesh& mesh, double amplitude, double mode) {
  Field h(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    h[i] = 1.0 + amplitude * std::cos(mode * std::numbers::pi * mesh.node(i) /
                                      mesh.length());
  }
  return h;
}

}  // namespace

Field load_field_csv(const std::string& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file: " + path);
  Field values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x >> v)) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw ConfigError(path + ": malformed field row: " + line);
    }
    first = false;
    const int i = static_cast<int>(values.size());
    if (i >= mesh.n_nodes()) throw ConfigError(path + ": more rows than mesh nodes");
    if (std::abs(x - mesh.node(i)) > 1e-8 * std::max(1.0, mesh.length())) {
      throw ConfigError(path + ": node " + std::to_string(i) +
                        " coordinate mismatch with the mesh");
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(mesh.n_nodes())) {
    throw ConfigError(path + ": expected " + std::to_string(mesh.n_nodes()) +
                      " rows, got " + std::to_string(values.size()));
  }
  return values;
}

void write_field_csv(const std::string& path, const Mesh& mesh,
                     std::span<const double> values) {
  std::ostringstream out;
  out << "x,value\n";
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    out << fmt(mesh.node(i)) << "," << fmt(values[i]) << "\n";
  }
  write_text(path, out.str());
}

void write_snapshot(const std::string& path, const Mesh& mesh,
                    std::span<const double> h, std::span<const double> s,
                    std::span<const double> mu, std::span<const double> f,
                    bool mirror) {
  std::ostringstream out;
  out << "x,h,s,H,mu,f\n";
  auto row = [&](double x, int i) {
    out << fmt(x) << "," << fmt(h[i]) << "," << fmt(s[i]) << ","
        << fmt(h[i] + s[i]) << "," << fmt(mu[i]) << "," << fmt(f[i]) << "\n";
  };
  if (mirror) {
    for (int i = mesh.n_nodes() - 1; i >= 1; --i) row(-mesh.node(i), i);
  }
  for (int i = 0; i < mesh.n_nodes(); ++i) row(mesh.node(i), i);
  write_text(path, out.str());
}

ResolvedScenario resolve_scenario(const Scenario& scenario, bool need_target) {
  Mesh mesh = scenario.make_mesh();
  ResolvedScenario out{mesh, {}, {}, {}, {}};

  // Substrate first; steady pre-runs start from it.
  switch (scenario.substrate.kind) {
    case SubstrateSpec::Kind::Flat:
      out.s0.assign(mesh.n_nodes(), 0.0);
      break;
    case SubstrateSpec::Kind::Tanh: {
      out.s0.resize(mesh.n_nodes());
      const auto& t = scenario.substrate;
      for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double x = mesh.node(i);
        out.s0[i] = t.a * (std::tanh((x + t.c1) / t.d) - std::tanh((x - t.c2) / t.d));
      }
      break;
    }
    case SubstrateSpec::Kind::File:
      out.s0 = load_field_csv(scenario.substrate.path, mesh);
      break;
  }

  switch (scenario.h_init.kind) {
    case HInitSpec::Kind::Cosine:
      out.h0 = cosine_profile(mesh, scenario.h_amplitude, scenario.h_mode);
      break;
    case HInitSpec::Kind::Gaussian: {
      out.h0.resize(mesh.n_nodes());
      for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double wx = scenario.h_init.gauss_width * mesh.node(i);
        out.h0[i] = 1.0 + scenario.h_init.gauss_amplitude * std::exp(-wx * wx);
      }
      break;
    }
    case HInitSpec::Kind::Steady: {
      const Field base = cosine_profile(mesh, scenario.h_amplitude, scenario.h_mode);
      const double dt = scenario.grid().dt();
      const int steps =
          std::max(1, static_cast<int>(std::llround(scenario.h_init.pre_horizon / dt)));
      SteadyTarget pre = make_target_steady(mesh, scenario.phys(),
                                            TimeGrid{steps * dt, steps}, base,
                                            out.s0, /*beta=*/0);
      if (!pre.steady) {
        out.warnings.push_back("initial-state pre-run not steady at T=" +
                               fmt(scenario.h_init.pre_horizon) +
                               " (rate " + fmt(pre.rate) + ")");
      }
      out.h0 = std::move(pre.hbar);
      break;
    }
    case HInitSpec::Kind::File:
      out.h0 = load_field_csv(scenario.h_init.path, mesh);
      break;
  }

  if (!need_target && !scenario.target) return out;
  if (!scenario.target) {
    throw ConfigError(scenario.name + ": this mode needs a target but none is set");
  }

  const TargetSpec& t = *scenario.target;
  switch (t.kind) {
    case TargetSpec::Kind::Steady: {
      const double dt = scenario.grid().dt();
      const int steps = std::max(1, static_cast<int>(std::llround(t.pre_horizon / dt)));
      SteadyTarget pre = make_target_steady(mesh, scenario.phys(),
                                            TimeGrid{steps * dt, steps}, out.h0,
                                            out.s0, scenario.beta);
      if (!pre.steady) {
        out.warnings.push_back("target pre-run not steady at T=" + fmt(t.pre_horizon) +
                               " (rate " + fmt(pre.rate) + ")");
      }
      out.hbar = std::move(pre.hbar);
      break;
    }
    case TargetSpec::Kind::Flat:
      out.hbar.assign(mesh.n_nodes(), t.value);
      break;
    case TargetSpec::Kind::FlatMassMatched:
      out.hbar.assign(mesh.n_nodes(), integrate(mesh, out.h0) / mesh.length());
      break;
    case TargetSpec::Kind::Wave: {
      out.hbar.resize(mesh.n_nodes());
      for (int i = 0; i < mesh.n_nodes(); ++i) {
        out.hbar[i] = 1.0 + t.amplitude * std::cos(t.mode * std::numbers::pi *
                                                   mesh.node(i) / mesh.length());
      }
      break;
    }
    case TargetSpec::Kind::File:
      out.hbar = load_field_csv(t.path, mesh);
      break;
  }

  if (scenario.beta == 0 && !mass_compatible(mesh, out.h0, out.hbar)) {
    out.warnings.push_back(
        "target is unreachable in mass: film mass is control-invariant but the "
        "target mass differs from the initial film mass");
  }
  return out;
}

ControlProblem make_control_problem(const Scenario& scenario,
                                    const ResolvedScenario& resolved) {
  ControlProblem problem{resolved.mesh, scenario.phys(), scenario.control_grid(),
                         resolved.h0,   resolved.s0,     resolved.hbar,
                         scenario.beta, scenario.alpha};
  problem.validate();
  return problem;
}

std::string summary_to_json(const RunSummary& summary, const Scenario& scenario) {
  nlohmann::json j;
  j["scenario"] = summary.scenario_name;
  j["mode"] = summary.mode;
  j["termination_reason"] = summary.termination;
  if (summary.final_cost) j["final_cost"] = *summary.final_cost;
  if (summary.final_grad_norm) j["final_grad_norm"] = *summary.final_grad_norm;
  if (summary.final_linf_error) j["final_linf_error"] = *summary.final_linf_error;
  if (summary.max_linf_error) j["linf_error_max_over_time"] = *summary.max_linf_error;
  j["mass_drift"] = summary.mass_drift;
  j["wall_time_seconds"] = summary.wall_seconds;
  j["files"] = summary.files;
  j["warnings"] = summary.warnings;

  nlohmann::json cfg;
  cfg["L"] = scenario.length;
  cfg["n_nodes"] = scenario.n_nodes;
  cfg["T"] = scenario.horizon;
  cfg["n_steps"] = scenario.n_steps;
  cfg["Ca"] = scenario.capillary;
  cfg["Bo"] = scenario.bond;
  cfg["c"] = scenario.tension;
  cfg["gamma"] = scenario.damping;
  cfg["A"] = scenario.hamaker;
  cfg["eps"] = scenario.eps;
  cfg["alpha"] = scenario.alpha;
  cfg["beta"] = scenario.beta;
  cfg["tol"] = scenario.tol;
  cfg["k_max"] = scenario.k_max;
  cfg["lambda0"] = scenario.lambda0;
  if (scenario.control_horizon) cfg["control_horizon"] = *scenario.control_horizon;
  cfg["ic.h_amplitude"] = scenario.h_amplitude;
  cfg["ic.mode"] = scenario.h_mode;
  j["config"] = cfg;
  j["config_text"] = serialize_scenario(scenario);
  return j.dump(2) + "\n";
}

void write_summary(const std::string& path, const RunSummary& summary,
                   const Scenario& scenario) {
  write_text(path, summary_to_json(summary, scenario));
}

namespace {

void write_energy_csv(const std::string& path, const TimeGrid& grid,
                      const EnergyReport& report) {
  std::ostringstream out;
  out << "step,t,E,D_fluid,D_sub,W,residual\n";
  out << "0,0," << fmt(report.energy[0]) << ",0,0,0,0\n";
  for (int k = 0; k < grid.n_steps; ++k) {
    out << (k + 1) << "," << fmt((k + 1) * grid.dt()) << ","
        << fmt(report.energy[k + 1]) << "," << fmt(report.d_fluid[k]) << ","
        << fmt(report.d_substrate[k]) << "," << fmt(report.work[k]) << ","
        << fmt(report.residual[k]) << "\n";
  }
  write_text(path, out.str());
}

}  // namespace

RunSummary run_forward_scenario(const Scenario& scenario, const RunOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(opts.out_dir);

  RunSummary summary;
  summary.scenario_name = scenario.name;
  summary.mode = "forward";

  // Solver failures still leave a summary behind before propagating.
  auto capture_failure = [&](const std::exception& err) {
    summary.termination = std::string("error: ") + err.what();
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    summary.files.push_back("summary.json");
    write_summary(opts.out_dir + "/summary.json", summary, scenario);
  };

  ResolvedScenario resolved{Mesh(1.0, 3), {}, {}, {}, {}};
  try {
    resolved = resolve_scenario(scenario, /*need_target=*/false);
  } catch (const std::exception& err) {
    capture_failure(err);
    throw;
  }
  const Mesh& mesh = resolved.mesh;
  const TimeGrid grid = scenario.grid();
  const int cadence = snapshot_cadence(opts, grid.n_steps);
  const bool track_energy = scenario.damping > 0.0;
  summary.warnings = resolved.warnings;

  ForwardIntegrator stepper(mesh, scenario.phys(), grid.dt(), resolved.h0,
                            resolved.s0);
  const Field zero(mesh.n_nodes(), 0.0);
  std::vector<double> mass;
  mass.reserve(grid.n_steps + 1);

  // The energy balance needs the stored history, so damped runs keep it.
  StateTrajectory traj;
  if (track_energy) {
    traj.h = SpaceTimeField(grid.n_steps + 1, mesh.n_nodes());
    traj.mu = SpaceTimeField(grid.n_steps + 1, mesh.n_nodes());
    traj.s = SpaceTimeField(grid.n_steps + 1, mesh.n_nodes());
  }

  auto snapshot = [&](int step) {
    const std::string name = snapshot_name(step);
    write_snapshot(opts.out_dir + "/" + name, mesh, stepper.h(), stepper.s(),
                   stepper.mu(), zero, opts.mirror);
    summary.files.push_back(name);
  };
  auto record = [&](int step) {
    mass.push_back(integrate(mesh, stepper.h()));
    if (track_energy) {
      traj.h.assign_level(step, stepper.h());
      traj.mu.assign_level(step, stepper.mu());
      traj.s.assign_level(step, stepper.s());
    }
  };

  try {
    record(0);
    snapshot(0);
    for (int k = 1; k <= grid.n_steps; ++k) {
      stepper.advance(zero);
      record(k);
      if (k % cadence == 0 || k == grid.n_steps) snapshot(k);
    }
  } catch (const std::exception& err) {
    capture_failure(err);
    throw;
  }

  if (track_energy) {
    const SpaceTimeField zero_f(grid.n_steps + 1, mesh.n_nodes());
    write_energy_csv(opts.out_dir + "/energy.csv", grid,
                     dissipation_balance(mesh, scenario.phys(), grid, traj, zero_f));
    summary.files.push_back("energy.csv");
  }

  summary.mass_drift = mass_drift_of(mass);
  summary.termination = "completed";
  if (!resolved.hbar.empty()) {
    double err = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      const double v = stepper.h()[i] +
                       (scenario.beta != 0 ? stepper.s()[i] : 0.0) -
                       resolved.hbar[i];
      err = std::max(err, std::abs(v));
    }
    summary.final_linf_error = err;
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  summary.files.push_back("summary.json");
  write_summary(opts.out_dir + "/summary.json", summary, scenario);
  return summary;
}

RunSummary run_optimize_scenario(const Scenario& scenario, const RunOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(opts.out_dir);

  RunSummary summary;
  summary.scenario_name = scenario.name;
  summary.mode = "optimize";

  // Solver failures still leave a summary behind before propagating.
  auto capture_failure = [&](const std::exception& err) {
    summary.termination = std::string("error: ") + err.what();
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    summary.files.push_back("summary.json");
    write_summary(opts.out_dir + "/summary.json", summary, scenario);
  };

  ResolvedScenario resolved{Mesh(1.0, 3), {}, {}, {}, {}};
  try {
    resolved = resolve_scenario(scenario, /*need_target=*/true);
  } catch (const std::exception& err) {
    capture_failure(err);
    throw;
  }
  ControlProblem problem = make_control_problem(scenario, resolved);
  summary.warnings = resolved.warnings;

  DescentOptions options;
  options.tol = scenario.tol;
  options.max_iterations = scenario.k_max;
  options.lambda0 = scenario.lambda0;

  DescentResult result;
  try {
    result = gradient_descent(problem, options);
  } catch (const std::exception& err) {
    capture_failure(err);
    throw;
  }

  // optim.csv: one row per evaluated iterate.
  {
    std::ostringstream out;
    out << "iter,J,grad_norm,lambda,linf_err\n";
    for (std::size_t i = 0; i < result.report.cost.size(); ++i) {
      out << i << "," << fmt(result.report.cost[i]) << ","
          << fmt(result.report.grad_norm[i]) << "," << fmt(result.report.lambda[i])
          << "," << fmt(result.report.linf_error[i]) << "\n";
    }
    write_text(opts.out_dir + "/optim.csv", out.str());
    summary.files.push_back("optim.csv");
  }

  const Mesh& mesh = problem.mesh;
  const int n_steps = problem.grid.n_steps;
  const int cadence = snapshot_cadence(opts, n_steps);
  for (int k = 0; k <= n_steps; ++k) {
    if (k % cadence == 0 || k == n_steps) {
      const std::string name = snapshot_name(k);
      write_snapshot(opts.out_dir + "/" + name, mesh, result.trajectory.h.level(k),
                     result.trajectory.s.level(k), result.trajectory.mu.level(k),
                     result.control.level(k), opts.mirror);
      summary.files.push_back(name);
    }
  }

  if (scenario.damping > 0.0) {
    write_energy_csv(
        opts.out_dir + "/energy.csv", problem.grid,
        dissipation_balance(mesh, problem.phys, problem.grid, result.trajectory,
                            result.control));
    summary.files.push_back("energy.csv");
  }

  summary.termination = to_string(result.report.termination);
  summary.final_cost = result.report.final_cost.total;
  summary.final_grad_norm = result.report.grad_norm.back();
  summary.final_linf_error = final_tracking_error(problem, result.trajectory);
  summary.max_linf_error = max_tracking_error(problem, result.trajectory);
  summary.mass_drift = mass_drift_of(result.trajectory.mass);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  summary.files.push_back("summary.json");
  write_summary(opts.out_dir + "/summary.json", summary, scenario);
  return summary;
}

RunSummary run_energy_check(const Scenario& scenario, const RunOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!(scenario.damping > 0.0)) {
    throw ConfigError(scenario.name +
                      ": energy-check needs gamma > 0 (the energy carries 1/gamma)");
  }
  fs::create_directories(opts.out_dir);

  ResolvedScenario resolved = resolve_scenario(scenario, /*need_target=*/false);
  const Mesh& mesh = resolved.mesh;
  const TimeGrid grid = scenario.grid();

  RunSummary summary;
  summary.scenario_name = scenario.name;
  summary.mode = "energy-check";
  summary.warnings = resolved.warnings;

  const SpaceTimeField zero_f(grid.n_steps + 1, mesh.n_nodes());
  StateTrajectory traj = run_forward(mesh, scenario.phys(), grid, resolved.h0,
                                     resolved.s0, zero_f);
  EnergyReport report = dissipation_balance(mesh, scenario.phys(), grid, traj, zero_f);
  write_energy_csv(opts.out_dir + "/energy.csv", grid, report);
  summary.files.push_back("energy.csv");

  int violations = 0;
  for (int k = 0; k < grid.n_steps; ++k) {
    const double allowed = 1e-8 * (1.0 + std::abs(report.energy[k]));
    if (report.energy[k + 1] > report.energy[k] + allowed) ++violations;
  }
  if (violations > 0) {
    summary.warnings.push_back("energy increased on " + std::to_string(violations) +
                               " steps beyond tolerance");
  }

  summary.termination = "completed";
  summary.mass_drift = mass_drift_of(traj.mass);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  summary.files.push_back("summary.json");
  write_summary(opts.out_dir + "/summary.json", summary, scenario);
  return summary;
}

GradCheckReport grad_check_problem(const ControlProblem& problem, int n_dirs,
                                   double delta, unsigned seed) {
  GradCheckReport report;
  report.delta = delta;
  report.seed = seed;

  const ControlField f0 = zero_control(problem);
  CostEval base = evaluate_cost(problem, f0);
  const ControlField gradient = reduced_gradient(problem, f0, base.trajectory);

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  for (int d = 0; d < n_dirs; ++d) {
    ControlField direction(f0.n_levels(), f0.n_nodes());
    for (int k = 1; k < direction.n_levels(); ++k) {
      for (auto& v : direction.level(k)) v = uniform(rng);
    }

    ControlField plus(f0.n_levels(), f0.n_nodes());
    ControlField minus(f0.n_levels(), f0.n_nodes());
    for (int k = 1; k < direction.n_levels(); ++k) {
      auto pk = plus.level(k);
      auto mk = minus.level(k);
      const auto dk = direction.level(k);
      for (std::size_t i = 0; i < pk.size(); ++i) {
        pk[i] = delta * dk[i];
        mk[i] = -delta * dk[i];
      }
    }

    const double fd =
        (reduced_cost(problem, plus) - reduced_cost(problem, minus)) / (2.0 * delta);
    const double ip =
        space_time_inner(problem.mesh, problem.grid, gradient, direction);
    const double scale = std::max(std::abs(fd), std::abs(ip));
    const double err = scale < 1e-14 ? 0.0 : std::abs(fd - ip) / scale;
    report.errors.push_back(err);
    report.max_error = std::max(report.max_error, err);
  }
  report.pass = report.max_error < 1e-3;
  return report;
}

GradCheckReport grad_check(const Scenario& scenario, int n_dirs, double delta,
                           unsigned seed) {
  ResolvedScenario resolved = resolve_scenario(scenario, /*need_target=*/true);
  return grad_check_problem(make_control_problem(scenario, resolved), n_dirs,
                            delta, seed);
}

std::vector<std::string> write_target_file(const Scenario& scenario,
                                           const std::string& path) {
  ResolvedScenario resolved = resolve_scenario(scenario, /*need_target=*/true);
  write_field_csv(path, resolved.mesh, resolved.hbar);
  return resolved.warnings;
}

}  // namespace thinfilm
