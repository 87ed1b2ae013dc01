#include "thinfilm/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "thinfilm/energy.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

void PhysParams::validate() const {
  if (!std::isfinite(capillary) || capillary <= 0.0) {
    throw std::invalid_argument("PhysParams: capillary number must be > 0");
  }
  if (!std::isfinite(bond) || !std::isfinite(tension) || !std::isfinite(damping)) {
    throw std::invalid_argument("PhysParams: parameters must be finite");
  }
  if (tension < 0.0 || damping < 0.0) {
    throw std::invalid_argument("PhysParams: tension and damping must be >= 0");
  }
}

void TimeGrid::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw std::invalid_argument("TimeGrid: horizon must be > 0");
  }
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
}

namespace {

// Interleaves node-level 3x3 blocks into the coupled system, unknown order
// (h_i, mu_i, s_i). Null blocks stay zero.
BandedMatrix interleave_blocks(int n_nodes,
                               const BandedMatrix* blocks[3][3]) {
  BandedMatrix out(3 * n_nodes, 5);
  for (int i = 0; i < n_nodes; ++i) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int j = i + dj;
      if (j < 0 || j >= n_nodes) continue;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const BandedMatrix* blk = blocks[a][b];
          if (blk == nullptr) continue;
          out.at(3 * i + a, 3 * j + b) = (*blk)(i, j);
        }
      }
    }
  }
  return out;
}

}  // namespace

BandedMatrix assemble_step_matrix(const Mesh& mesh, const PhysParams& phys,
                                  double dt, std::span<const double> h_level,
                                  const BandedMatrix& mass,
                                  const BandedMatrix& stiffness) {
  const double ca = phys.capillary;
  const double bo = phys.bond;
  const double convex = phys.potential.phi_plus_double_prime();

  const QuadWeight mobility =
      quad_weight(mesh, h_level, [](double h) { return h * h * h; });
  BandedMatrix transport = assemble_weighted_stiffness(mesh, mobility);
  for (int i = 0; i < transport.order(); ++i) {
    for (int j = std::max(0, i - 1); j <= std::min(transport.order() - 1, i + 1); ++j) {
      transport.at(i, j) *= dt / 3.0;
    }
  }

  // Potential row, film column: (Bo/Ca - phi_plus'') M - (1/Ca) K.
  const BandedMatrix coupling_h =
      BandedMatrix::scaled_sum(bo / ca - convex, mass, -1.0 / ca, stiffness);
  // Potential row, substrate column: (Bo/Ca) M - (1/Ca) K.
  const BandedMatrix coupling_s =
      BandedMatrix::scaled_sum(bo / ca, mass, -1.0 / ca, stiffness);
  // Substrate row, film column: dt (gamma/Ca) (K - Bo M).
  const BandedMatrix gravity = BandedMatrix::scaled_sum(
      dt * phys.damping / ca, stiffness, -dt * phys.damping * bo / ca, mass);
  // Substrate row diagonal: M + dt c^2 K.
  const BandedMatrix substrate = BandedMatrix::scaled_sum(
      1.0, mass, dt * phys.tension * phys.tension, stiffness);

  const BandedMatrix* blocks[3][3] = {
      {&mass, &transport, nullptr},
      {&coupling_h, &mass, &coupling_s},
      {&gravity, nullptr, &substrate},
  };
  return interleave_blocks(mesh.n_nodes(), blocks);
}

Field initial_mu(const Mesh& mesh, const PhysParams& phys,
                 std::span<const double> h0, std::span<const double> s0) {
  const int n = mesh.n_nodes();
  const BandedMatrix mass = assemble_mass(mesh);
  const BandedMatrix stiffness = assemble_stiffness(mesh);
  const Potential& pot = phys.potential;

  Field height(n);
  for (int i = 0; i < n; ++i) height[i] = h0[i] + s0[i];
  const std::vector<double> m_height = mass.apply(height);
  const std::vector<double> k_height = stiffness.apply(height);

  Field rhs = assemble_load(
      mesh, quad_weight(mesh, h0, [&](double h) { return pot.phi_prime(h); }));
  for (int i = 0; i < n; ++i) {
    rhs[i] += -phys.bond / phys.capillary * m_height[i] +
              1.0 / phys.capillary * k_height[i];
  }
  return BandedLU(mass).solve(std::move(rhs));
}

ForwardIntegrator::ForwardIntegrator(const Mesh& mesh, const PhysParams& phys,
                                     double dt, Field h0, Field s0)
    : mesh_(mesh),
      phys_(phys),
      dt_(dt),
      mass_(assemble_mass(mesh)),
      stiffness_(assemble_stiffness(mesh)),
      h_(std::move(h0)),
      s_(std::move(s0)) {
  phys_.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw std::invalid_argument("ForwardIntegrator: dt must be > 0");
  }
  if (h_.size() != static_cast<std::size_t>(mesh.n_nodes()) ||
      s_.size() != static_cast<std::size_t>(mesh.n_nodes())) {
    throw std::invalid_argument("ForwardIntegrator: field size mismatch");
  }
  if (!all_finite(h_) || !all_finite(s_)) {
    throw std::invalid_argument("ForwardIntegrator: non-finite initial data");
  }
  mu_ = initial_mu(mesh_, phys_, h_, s_);
}

void ForwardIntegrator::advance(std::span<const double> control_next) {
  const int n = mesh_.n_nodes();
  if (control_next.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("ForwardIntegrator: control size mismatch");
  }

  const BandedMatrix system =
      assemble_step_matrix(mesh_, phys_, dt_, h_, mass_, stiffness_);

  const std::vector<double> mh = mass_.apply(h_);
  const std::vector<double> ms = mass_.apply(s_);
  const std::vector<double> mf = mass_.apply(control_next);

  Field concave(n, 0.0);
  if (phys_.potential.hamaker() > 0.0) {
    concave = assemble_load(
        mesh_, quad_weight(mesh_, h_, [&](double h) {
          return phys_.potential.phi_minus_prime(h);
        }));
  }

  std::vector<double> rhs(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rhs[3 * i + 0] = mh[i];
    rhs[3 * i + 1] = concave[i];
    rhs[3 * i + 2] = ms[i] + dt_ * mf[i];
  }

  std::vector<double> sol;
  try {
    sol = BandedLU(system).solve(std::move(rhs));
  } catch (const SingularMatrixError& err) {
    throw SingularMatrixError("forward step " + std::to_string(step_ + 1) + ": " +
                              err.what());
  }
  if (!all_finite(sol)) {
    throw BlowUpError("forward step " + std::to_string(step_ + 1) +
                      ": non-finite solution");
  }

  for (int i = 0; i < n; ++i) {
    h_[i] = sol[3 * i + 0];
    mu_[i] = sol[3 * i + 1];
    s_[i] = sol[3 * i + 2];
  }
  ++step_;
}

StepResult imex_step(const Mesh& mesh, const PhysParams& phys, double dt,
                     std::span<const double> h_k, std::span<const double> s_k,
                     std::span<const double> control_next) {
  ForwardIntegrator stepper(mesh, phys, dt, Field(h_k.begin(), h_k.end()),
                            Field(s_k.begin(), s_k.end()));
  stepper.advance(control_next);
  return {stepper.h(), stepper.mu(), stepper.s()};
}

namespace {

double min_value(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

}  // namespace

StateTrajectory run_forward(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const Field& h0,
                            const Field& s0, const SpaceTimeField& control) {
  grid.validate();
  const int n = mesh.n_nodes();
  const int n_steps = grid.n_steps;
  if (control.n_levels() != n_steps + 1 || control.n_nodes() != n) {
    throw std::invalid_argument("run_forward: control shape mismatch");
  }
  for (int k = 0; k <= n_steps; ++k) {
    if (!all_finite(control.level(k))) {
      throw std::invalid_argument("run_forward: non-finite control");
    }
  }

  ForwardIntegrator stepper(mesh, phys, grid.dt(), h0, s0);

  StateTrajectory traj;
  traj.h = SpaceTimeField(n_steps + 1, n);
  traj.mu = SpaceTimeField(n_steps + 1, n);
  traj.s = SpaceTimeField(n_steps + 1, n);
  traj.min_h.reserve(n_steps + 1);
  traj.mass.reserve(n_steps + 1);
  const bool track_energy = phys.damping > 0.0;
  if (track_energy) traj.energy.reserve(n_steps + 1);

  auto record = [&](int level) {
    traj.h.assign_level(level, stepper.h());
    traj.mu.assign_level(level, stepper.mu());
    traj.s.assign_level(level, stepper.s());
    traj.min_h.push_back(min_value(stepper.h()));
    traj.mass.push_back(integrate(mesh, stepper.h()));
    if (track_energy) {
      traj.energy.push_back(free_energy(mesh, phys, stepper.h(), stepper.s()));
    }
  };

  record(0);
  for (int k = 0; k < n_steps; ++k) {
    stepper.advance(control.level(k + 1));
    record(k + 1);
  }
  return traj;
}

SteadyTarget make_target_steady(const Mesh& mesh, const PhysParams& phys,
                                const TimeGrid& grid, const Field& h0,
                                const Field& s0, int beta) {
  grid.validate();
  const int n = mesh.n_nodes();
  ForwardIntegrator stepper(mesh, phys, grid.dt(), h0, s0);
  const Field zero(n, 0.0);

  Field prev_h = stepper.h();
  for (int k = 0; k < grid.n_steps; ++k) {
    prev_h = stepper.h();
    stepper.advance(zero);
  }

  SteadyTarget target;
  target.hbar.resize(n);
  for (int i = 0; i < n; ++i) {
    target.hbar[i] = stepper.h()[i] + (beta != 0 ? stepper.s()[i] : 0.0);
  }
  target.rate = linf_diff(stepper.h(), prev_h) / grid.dt();
  target.steady = target.rate < 1e-6;
  return target;
}

}  // namespace thinfilm
