#pragma once

#include <span>

#include "thinfilm/forward.hpp"
#include "thinfilm/mesh.hpp"

namespace thinfilm {

/// Multipliers of the three state rows at one time level.
struct AdjointLevel {
  Field p, q, r;
};

/// Backward multiplier history. Levels 1..N are produced by the backward
/// sweep; level 0 holds the sensitivities to the initial data (its q slot is
/// identically zero and its r slot copies level 1). Only levels 1..N enter the
/// reduced gradient.
struct AdjointTrajectory {
  SpaceTimeField p, q, r;

  int n_steps() const { return p.n_levels() - 1; }
};

/// Terminal multiplier solve. The system matrix is the transpose of the last
/// forward step matrix; the right side carries the tracking mismatch
/// M (hbar - (h + beta s)(T)) in the p slot and beta times it in the r slot.
AdjointLevel terminal_solve(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const StateTrajectory& state,
                            const Field& hbar, int beta);

/// One backward step producing level k from level k+1, for 1 <= k <= N-1.
/// Implicit side: transpose of the forward step matrix that produced level k.
/// Explicit side: the transport coupling through the stored state (mobility
/// squared times the potential-gradient slope) and the concave potential
/// curvature, both evaluated against the level k+1 multipliers.
AdjointLevel imex_back_step(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const StateTrajectory& state,
                            int k, const AdjointLevel& next);

/// Terminal solve followed by the full backward sweep and the level-0 fill.
AdjointTrajectory run_adjoint(const Mesh& mesh, const PhysParams& phys,
                              const TimeGrid& grid, const StateTrajectory& state,
                              const Field& hbar, int beta);

}  // namespace thinfilm
