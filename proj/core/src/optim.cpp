#include "thinfilm/optim.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "thinfilm/assembly.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

void ControlProblem::validate() const {
  phys.validate();
  grid.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("ControlProblem: alpha must be > 0");
  }
  if (beta != 0 && beta != 1) {
    throw std::invalid_argument("ControlProblem: beta must be 0 or 1");
  }
  const auto n = static_cast<std::size_t>(mesh.n_nodes());
  if (h0.size() != n || s0.size() != n || hbar.size() != n) {
    throw std::invalid_argument("ControlProblem: field size mismatch");
  }
}

ControlField zero_control(const ControlProblem& problem) {
  return ControlField(problem.grid.n_steps + 1, problem.mesh.n_nodes());
}

double control_penalty(const ControlProblem& problem, const ControlField& control) {
  const double dt = problem.grid.dt();
  double acc = 0.0;
  for (int k = 1; k <= problem.grid.n_steps; ++k) {
    acc += dt * mass_inner(problem.mesh, control.level(k), control.level(k));
  }
  return 0.5 * problem.alpha * acc;
}

CostEval evaluate_cost(const ControlProblem& problem, const ControlField& control) {
  problem.validate();
  CostEval eval;
  eval.trajectory = run_forward(problem.mesh, problem.phys, problem.grid,
                                problem.h0, problem.s0, control);

  const int last = eval.trajectory.n_steps();
  const int n = problem.mesh.n_nodes();
  Field mismatch(n);
  const auto h_final = eval.trajectory.h.level(last);
  const auto s_final = eval.trajectory.s.level(last);
  for (int i = 0; i < n; ++i) {
    mismatch[i] =
        h_final[i] + (problem.beta != 0 ? s_final[i] : 0.0) - problem.hbar[i];
  }
  eval.cost.tracking = 0.5 * mass_inner(problem.mesh, mismatch, mismatch);
  eval.cost.penalty = control_penalty(problem, control);
  eval.cost.total = eval.cost.tracking + eval.cost.penalty;
  return eval;
}

double reduced_cost(const ControlProblem& problem, const ControlField& control) {
  return evaluate_cost(problem, control).cost.total;
}

ControlField combine_gradient(double alpha, const ControlField& control,
                              const SpaceTimeField& r) {
  ControlField g(control.n_levels(), control.n_nodes());
  for (int k = 1; k < control.n_levels(); ++k) {
    auto gk = g.level(k);
    const auto fk = control.level(k);
    const auto rk = r.level(k);
    for (std::size_t i = 0; i < gk.size(); ++i) gk[i] = alpha * fk[i] - rk[i];
  }
  return g;
}

ControlField reduced_gradient(const ControlProblem& problem,
                              const ControlField& control,
                              const StateTrajectory& trajectory) {
  const AdjointTrajectory adj = run_adjoint(problem.mesh, problem.phys,
                                            problem.grid, trajectory,
                                            problem.hbar, problem.beta);
  return combine_gradient(problem.alpha, control, adj.r);
}

double space_time_inner(const Mesh& mesh, const TimeGrid& grid,
                        const SpaceTimeField& a, const SpaceTimeField& b) {
  const double dt = grid.dt();
  double acc = 0.0;
  for (int k = 1; k <= grid.n_steps; ++k) {
    acc += dt * mass_inner(mesh, a.level(k), b.level(k));
  }
  return acc;
}

double space_time_norm(const Mesh& mesh, const TimeGrid& grid,
                       const SpaceTimeField& a) {
  return std::sqrt(space_time_inner(mesh, grid, a, a));
}

bool mass_compatible(const Mesh& mesh, const Field& h0, const Field& hbar,
                     double rel_tol) {
  const double m0 = integrate(mesh, h0);
  const double mt = integrate(mesh, hbar);
  return std::abs(mt - m0) <= rel_tol * std::max(1.0, std::abs(m0));
}

double final_tracking_error(const ControlProblem& problem,
                            const StateTrajectory& trajectory) {
  const int last = trajectory.n_steps();
  const int n = problem.mesh.n_nodes();
  double m = 0.0;
  const auto h = trajectory.h.level(last);
  const auto s = trajectory.s.level(last);
  for (int i = 0; i < n; ++i) {
    const double v = h[i] + (problem.beta != 0 ? s[i] : 0.0) - problem.hbar[i];
    m = std::max(m, std::abs(v));
  }
  return m;
}

double max_tracking_error(const ControlProblem& problem,
                          const StateTrajectory& trajectory) {
  const int n = problem.mesh.n_nodes();
  double m = 0.0;
  for (int k = 0; k <= trajectory.n_steps(); ++k) {
    const auto h = trajectory.h.level(k);
    const auto s = trajectory.s.level(k);
    for (int i = 0; i < n; ++i) {
      const double v = h[i] + (problem.beta != 0 ? s[i] : 0.0) - problem.hbar[i];
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::LineSearchStalled:
      return "line_search_stalled";
  }
  return "unknown";
}

namespace {

ControlField descent_candidate(const ControlField& f, double lambda,
                               const ControlField& g) {
  ControlField out(f.n_levels(), f.n_nodes());
  for (int k = 1; k < f.n_levels(); ++k) {
    auto ok = out.level(k);
    const auto fk = f.level(k);
    const auto gk = g.level(k);
    for (std::size_t i = 0; i < ok.size(); ++i) ok[i] = fk[i] - lambda * gk[i];
  }
  return out;
}

}  // namespace

DescentResult gradient_descent(const ControlProblem& problem,
                               const DescentOptions& options) {
  if (!(options.tol > 0.0) || options.max_iterations < 1 ||
      !(options.lambda0 > 0.0)) {
    throw std::invalid_argument("gradient_descent: bad options");
  }

  ControlField f = zero_control(problem);
  CostEval current = evaluate_cost(problem, f);
  ControlField gradient = reduced_gradient(problem, f, current.trajectory);
  double grad_norm = space_time_norm(problem.mesh, problem.grid, gradient);
  double lambda = options.lambda0;

  OptimReport report;
  auto record = [&](double gn) {
    report.cost.push_back(current.cost.total);
    report.grad_norm.push_back(gn);
    report.lambda.push_back(lambda);
    report.linf_error.push_back(final_tracking_error(problem, current.trajectory));
  };
  record(grad_norm);

  auto finish = [&](Termination why) {
    report.termination = why;
    report.final_cost = current.cost;
    DescentResult result;
    result.control = std::move(f);
    result.report = std::move(report);
    result.trajectory = std::move(current.trajectory);
    return result;
  };

  if (grad_norm <= options.tol) return finish(Termination::Converged);

  // A trial whose forward solve blows up counts as a cost increase: the step
  // was too long and the search halves it.
  auto try_candidate = [&](const ControlField& candidate) -> std::optional<CostEval> {
    try {
      return evaluate_cost(problem, candidate);
    } catch (const SingularMatrixError&) {
      return std::nullopt;
    } catch (const BlowUpError&) {
      return std::nullopt;
    }
  };

  for (int k = 0; k < options.max_iterations; ++k) {
    // Backtracking: halve until the cost stops increasing. The step size never
    // grows again on later iterations.
    ControlField candidate = descent_candidate(f, lambda, gradient);
    std::optional<CostEval> trial = try_candidate(candidate);
    while (!trial || trial->cost.total > current.cost.total) {
      lambda *= 0.5;
      if (lambda < options.lambda_min) {
        return finish(Termination::LineSearchStalled);
      }
      candidate = descent_candidate(f, lambda, gradient);
      trial = try_candidate(candidate);
    }

    f = std::move(candidate);
    current = std::move(*trial);
    gradient = reduced_gradient(problem, f, current.trajectory);
    grad_norm = space_time_norm(problem.mesh, problem.grid, gradient);
    report.iterations = k + 1;
    record(grad_norm);

    if (grad_norm <= options.tol) return finish(Termination::Converged);
  }
  return finish(Termination::MaxIterations);
}

}  // namespace thinfilm
