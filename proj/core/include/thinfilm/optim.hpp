#pragma once

#include <string>
#include <vector>

#include "thinfilm/adjoint.hpp"
#include "thinfilm/forward.hpp"
#include "thinfilm/mesh.hpp"

namespace thinfilm {

/// Control field on the full time grid; level 0 is unused by the scheme and
/// kept zero.
using ControlField = SpaceTimeField;

/// Everything a reduced-cost evaluation needs besides the control itself.
struct ControlProblem {
  Mesh mesh;
  PhysParams phys;
  TimeGrid grid;
  Field h0, s0;
  Field hbar;
  int beta = 1;
  double alpha = 1e-6;

  void validate() const;
};

struct CostBreakdown {
  double total = 0.0;
  double tracking = 0.0;
  double penalty = 0.0;
};

struct CostEval {
  CostBreakdown cost;
  StateTrajectory trajectory;
};

ControlField zero_control(const ControlProblem& problem);

/// Quadratic control penalty (alpha/2) sum_k dt f_k^T M f_k over levels 1..N.
double control_penalty(const ControlProblem& problem, const ControlField& control);

/// Forward solve plus cost split into tracking and penalty parts.
CostEval evaluate_cost(const ControlProblem& problem, const ControlField& control);

double reduced_cost(const ControlProblem& problem, const ControlField& control);

/// alpha f - r on levels 1..N, with r taken from the adjoint sweep of the
/// given trajectory.
ControlField reduced_gradient(const ControlProblem& problem,
                              const ControlField& control,
                              const StateTrajectory& trajectory);

/// g = alpha f - r levelwise (level 0 kept zero).
ControlField combine_gradient(double alpha, const ControlField& control,
                              const SpaceTimeField& r);

/// Mass- and dt-weighted space-time inner product over levels 1..N.
double space_time_inner(const Mesh& mesh, const TimeGrid& grid,
                        const SpaceTimeField& a, const SpaceTimeField& b);
double space_time_norm(const Mesh& mesh, const TimeGrid& grid,
                       const SpaceTimeField& a);

/// Film mass is invariant under any control, so a beta = 0 target is
/// reachable only if the target mass matches the initial film mass.
bool mass_compatible(const Mesh& mesh, const Field& h0, const Field& hbar,
                     double rel_tol = 1e-8);

/// Max-norm tracking error of the final level: |(h + beta s)(T) - hbar|.
double final_tracking_error(const ControlProblem& problem,
                            const StateTrajectory& trajectory);
/// Max over all time levels of the max-norm tracking error.
double max_tracking_error(const ControlProblem& problem,
                          const StateTrajectory& trajectory);

struct DescentOptions {
  double tol = 1e-4;
  int max_iterations = 300;
  double lambda0 = 1.0;
  double lambda_min = 1e-12;
};

enum class Termination { Converged, MaxIterations, LineSearchStalled };

std::string to_string(Termination t);

/// One row per evaluated iterate, starting with the initial guess.
struct OptimReport {
  std::vector<double> cost;
  std::vector<double> grad_norm;
  std::vector<double> lambda;
  std::vector<double> linf_error;
  int iterations = 0;
  Termination termination = Termination::Converged;
  CostBreakdown final_cost;
};

struct DescentResult {
  ControlField control;
  OptimReport report;
  StateTrajectory trajectory;  // of the returned control
};

/// Steepest descent with a persistently halving backtracking line search: the
/// step size only ever shrinks, each accepted iterate does not increase the
/// cost, and the iteration stops on the gradient norm, the iteration cap, or a
/// stalled search.
DescentResult gradient_descent(const ControlProblem& problem,
                               const DescentOptions& options);

}  // namespace thinfilm
