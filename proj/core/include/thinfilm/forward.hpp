#pragma once

#include <span>
#include <vector>

#include "thinfilm/assembly.hpp"
#include "thinfilm/banded.hpp"
#include "thinfilm/mesh.hpp"
#include "thinfilm/potential.hpp"

namespace thinfilm {

/// Physical parameters of the coupled film/substrate system.
struct PhysParams {
  double capillary = 1.0;        // Ca
  double bond = 1.0;             // Bo
  double tension = 0.1;          // substrate tension coefficient c
  double damping = 0.0;          // film damping gamma
  Potential potential{};

  void validate() const;
};

/// Uniform time grid on [0, horizon] with n_steps steps.
struct TimeGrid {
  double horizon = 1.0;
  int n_steps = 1;

  double dt() const { return horizon / static_cast<double>(n_steps); }
  void validate() const;
};

struct StepResult {
  Field h, mu, s;
};

/// Full stored state history plus per-step diagnostics. Level 0 of mu holds
/// the consistent initial chemical potential recovered from (h0, s0).
struct StateTrajectory {
  SpaceTimeField h, mu, s;
  std::vector<double> min_h;   // per level
  std::vector<double> mass;    // per level, integral of h
  std::vector<double> energy;  // per level; empty when damping == 0

  int n_steps() const { return h.n_levels() - 1; }
};

/// Coupled step matrix for unknowns (h, mu, s) interleaved per node,
/// half-bandwidth 5. The mobility weight is the cube of the given film level.
/// Pass the cached mass/stiffness matrices of the mesh.
BandedMatrix assemble_step_matrix(const Mesh& mesh, const PhysParams& phys,
                                  double dt, std::span<const double> h_level,
                                  const BandedMatrix& mass,
                                  const BandedMatrix& stiffness);

/// Chemical potential consistent with (h0, s0) at time zero, from a mass solve
/// of the potential row.
Field initial_mu(const Mesh& mesh, const PhysParams& phys,
                 std::span<const double> h0, std::span<const double> s0);

/// Advances the coupled system one implicit-explicit step at a time. The
/// convex potential part and all linear couplings are implicit; the mobility
/// weight and the concave potential part lag one level.
class ForwardIntegrator {
 public:
  ForwardIntegrator(const Mesh& mesh, const PhysParams& phys, double dt,
                    Field h0, Field s0);

  /// One step driven by the control at the new level. Throws
  /// SingularMatrixError / BlowUpError tagged with the step index.
  void advance(std::span<const double> control_next);

  const Field& h() const { return h_; }
  const Field& mu() const { return mu_; }
  const Field& s() const { return s_; }
  int step() const { return step_; }
  double time() const { return step_ * dt_; }
  double dt() const { return dt_; }

 private:
  const Mesh& mesh_;
  PhysParams phys_;
  double dt_;
  int step_ = 0;
  BandedMatrix mass_, stiffness_;
  Field h_, mu_, s_;
};

/// Single IMEX step from (h_k, s_k) driven by the control at level k+1.
StepResult imex_step(const Mesh& mesh, const PhysParams& phys, double dt,
                     std::span<const double> h_k, std::span<const double> s_k,
                     std::span<const double> control_next);

/// Integrates the full horizon and stores every level. The control field must
/// have n_steps + 1 levels; level 0 is unused.
StateTrajectory run_forward(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const Field& h0,
                            const Field& s0, const SpaceTimeField& control);

struct SteadyTarget {
  Field hbar;        // (h + beta s) at the final time
  double rate;       // max-norm time derivative at the final step
  bool steady;       // rate < 1e-6
};

/// Uncontrolled run used to produce a steady target profile. Streams the
/// solve, so long pre-runs do not store a trajectory.
SteadyTarget make_target_steady(const Mesh& mesh, const PhysParams& phys,
                                const TimeGrid& grid, const Field& h0,
                                const Field& s0, int beta);

}  // namespace thinfilm
