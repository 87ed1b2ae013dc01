#pragma once

#include <span>
#include <vector>

#include "thinfilm/forward.hpp"
#include "thinfilm/mesh.hpp"

namespace thinfilm {

/// Per-step energy bookkeeping of a stored trajectory. Entry k of the rate
/// quantities describes the step from level k to k+1; the balance residual is
/// first order in dt and is reported, not enforced.
struct EnergyReport {
  std::vector<double> energy;      // per level, n_steps + 1 entries
  std::vector<double> d_fluid;     // per step
  std::vector<double> d_substrate; // per step
  std::vector<double> work;        // per step
  std::vector<double> residual;    // per step
};

/// Free energy of one state: potential + gravity + surface + elastic +
/// film/substrate interaction terms, by 3-point Gauss on P1 fields.
/// Defined only for damping > 0 (the elastic term carries 1/damping).
double free_energy(const Mesh& mesh, const PhysParams& phys,
                   std::span<const double> h, std::span<const double> s);

/// Energy change per step against dissipation and external work.
EnergyReport dissipation_balance(const Mesh& mesh, const PhysParams& phys,
                                 const TimeGrid& grid,
                                 const StateTrajectory& traj,
                                 const SpaceTimeField& control);

}  // namespace thinfilm
