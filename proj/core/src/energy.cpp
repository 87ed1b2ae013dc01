#include "thinfilm/energy.hpp"

#include <array>
#include <stdexcept>

namespace thinfilm {

namespace {

constexpr std::array<double, 3> kGaussT = {0.11270166537925831, 0.5,
                                           0.88729833462074169};
constexpr std::array<double, 3> kGaussW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void require_damping(const PhysParams& phys) {
  if (!(phys.damping > 0.0)) {
    throw std::invalid_argument(
        "energy: defined only for damping > 0 (elastic term carries 1/damping)");
  }
}

}  // namespace

double free_energy(const Mesh& mesh, const PhysParams& phys,
                   std::span<const double> h, std::span<const double> s) {
  require_damping(phys);
  const double ca = phys.capillary;
  const double bo = phys.bond;
  const double c2 = phys.tension * phys.tension;
  const double dx = mesh.dx();
  const Potential& pot = phys.potential;

  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double hx = (h[e + 1] - h[e]) / dx;
    const double sx = (s[e + 1] - s[e]) / dx;
    for (int g = 0; g < 3; ++g) {
      const double t = kGaussT[g];
      const double hg = h[e] * (1.0 - t) + h[e + 1] * t;
      const double sg = s[e] * (1.0 - t) + s[e + 1] * t;
      const double density = pot.phi(hg) - 0.5 * bo / ca * hg * hg +
                             0.5 / ca * hx * hx +
                             0.5 * c2 / phys.damping * sx * sx +
                             (hx * sx - bo * hg * sg) / ca;
      acc += kGaussW[g] * dx * density;
    }
  }
  return acc;
}

EnergyReport dissipation_balance(const Mesh& mesh, const PhysParams& phys,
                                 const TimeGrid& grid,
                                 const StateTrajectory& traj,
                                 const SpaceTimeField& control) {
  require_damping(phys);
  const int n_steps = traj.n_steps();
  const double dt = grid.dt();
  const double dx = mesh.dx();

  EnergyReport report;
  report.energy.reserve(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) {
    report.energy.push_back(free_energy(mesh, phys, traj.h.level(k), traj.s.level(k)));
  }

  Field st(mesh.n_nodes());
  for (int k = 0; k < n_steps; ++k) {
    const auto h_old = traj.h.level(k);
    const auto mu_new = traj.mu.level(k + 1);
    const auto s_old = traj.s.level(k);
    const auto s_new = traj.s.level(k + 1);

    // Fluid dissipation (1/3) integral of h^3 mu_x^2, with the scheme's
    // weighting: mobility from the old level, potential gradient from the new.
    double d_fluid = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const double mux = (mu_new[e + 1] - mu_new[e]) / dx;
      for (int g = 0; g < 3; ++g) {
        const double t = kGaussT[g];
        const double hg = h_old[e] * (1.0 - t) + h_old[e + 1] * t;
        d_fluid += kGaussW[g] * dx * (hg * hg * hg) * mux * mux / 3.0;
      }
    }

    for (int i = 0; i < mesh.n_nodes(); ++i) st[i] = (s_new[i] - s_old[i]) / dt;
    const double d_sub = mass_inner(mesh, st, st) / phys.damping;
    const double work = mass_inner(mesh, control.level(k + 1), st) / phys.damping;

    const double rate = (report.energy[k + 1] - report.energy[k]) / dt;
    report.d_fluid.push_back(d_fluid);
    report.d_substrate.push_back(d_sub);
    report.work.push_back(work);
    report.residual.push_back(rate + d_fluid + d_sub - work);
  }
  return report;
}

}  // namespace thinfilm
