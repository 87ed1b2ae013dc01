#include "thinfilm/adjoint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinfilm/assembly.hpp"
#include "thinfilm/banded.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

struct AdjointWorkspace {
  BandedMatrix mass;
  BandedMatrix stiffness;
};

// Transport weight of the step k -> k+1: square of the old film level times
// the element slope of the new potential level, at quadrature points.
QuadWeight transport_weight(const Mesh& mesh, std::span<const double> h_old,
                            std::span<const double> mu_new) {
  QuadWeight w = quad_weight(mesh, h_old, [](double h) { return h * h; });
  const double dx = mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double mux = (mu_new[e + 1] - mu_new[e]) / dx;
    for (int g = 0; g < 3; ++g) {
      w.values[static_cast<std::size_t>(e) * 3 + g] *= mux;
    }
  }
  return w;
}

// Right side of the p row at level k: carries level k+1 multipliers through
// the mass term, the transposed transport coupling, and the concave potential
// curvature lagged at the old film level.
Field p_row_rhs(const Mesh& mesh, const PhysParams& phys, double dt,
                const AdjointWorkspace& ws, std::span<const double> h_old,
                std::span<const double> mu_new, std::span<const double> p_next,
                std::span<const double> q_next) {
  const int n = mesh.n_nodes();
  Field rhs = ws.mass.apply(p_next);

  const BandedMatrix convection =
      assemble_weighted_convection(mesh, transport_weight(mesh, h_old, mu_new));
  const std::vector<double> cp = convection.apply_transpose(p_next);
  for (int i = 0; i < n; ++i) rhs[i] -= dt * cp[i];

  if (phys.potential.hamaker() > 0.0) {
    const BandedMatrix curvature = assemble_weighted_mass(
        mesh, quad_weight(mesh, h_old, [&](double h) {
          return phys.potential.phi_minus_double_prime(h);
        }));
    const std::vector<double> cq = curvature.apply(q_next);
    for (int i = 0; i < n; ++i) rhs[i] += cq[i];
  }
  return rhs;
}

// Solves (forward step matrix at the mobility level h_weight)^T x = rhs.
AdjointLevel solve_transposed_system(const Mesh& mesh, const PhysParams& phys,
                                     double dt, const AdjointWorkspace& ws,
                                     std::span<const double> h_weight,
                                     const Field& rhs_p, const Field& rhs_r,
                                     int level_tag) {
  const int n = mesh.n_nodes();
  const BandedMatrix system =
      assemble_step_matrix(mesh, phys, dt, h_weight, ws.mass, ws.stiffness);

  std::vector<double> rhs(3 * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    rhs[3 * i + 0] = rhs_p[i];
    rhs[3 * i + 2] = rhs_r[i];
  }

  std::vector<double> sol;
  try {
    sol = BandedLU(system).solve_transposed(std::move(rhs));
  } catch (const SingularMatrixError& err) {
    throw SingularMatrixError("adjoint level " + std::to_string(level_tag) +
                              ": " + err.what());
  }
  if (!all_finite(sol)) {
    throw BlowUpError("adjoint level " + std::to_string(level_tag) +
                      ": non-finite solution");
  }

  AdjointLevel out;
  out.p.resize(n);
  out.q.resize(n);
  out.r.resize(n);
  for (int i = 0; i < n; ++i) {
    out.p[i] = sol[3 * i + 0];
    out.q[i] = sol[3 * i + 1];
    out.r[i] = sol[3 * i + 2];
  }
  return out;
}

AdjointWorkspace make_workspace(const Mesh& mesh) {
  return {assemble_mass(mesh), assemble_stiffness(mesh)};
}

}  // namespace

AdjointLevel terminal_solve(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const StateTrajectory& state,
                            const Field& hbar, int beta) {
  const int n = mesh.n_nodes();
  const int big_n = state.n_steps();
  if (hbar.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("terminal_solve: target size mismatch");
  }
  const AdjointWorkspace ws = make_workspace(mesh);

  Field mismatch(n);
  const auto h_final = state.h.level(big_n);
  const auto s_final = state.s.level(big_n);
  for (int i = 0; i < n; ++i) {
    mismatch[i] = hbar[i] - (h_final[i] + (beta != 0 ? s_final[i] : 0.0));
  }
  const std::vector<double> m_mismatch = ws.mass.apply(mismatch);

  Field rhs_p(m_mismatch.begin(), m_mismatch.end());
  Field rhs_r(n, 0.0);
  if (beta != 0) rhs_r = rhs_p;

  return solve_transposed_system(mesh, phys, grid.dt(), ws,
                                 state.h.level(big_n - 1), rhs_p, rhs_r, big_n);
}

AdjointLevel imex_back_step(const Mesh& mesh, const PhysParams& phys,
                            const TimeGrid& grid, const StateTrajectory& state,
                            int k, const AdjointLevel& next) {
  if (k < 1 || k >= state.n_steps()) {
    throw std::invalid_argument("imex_back_step: level out of range");
  }
  const AdjointWorkspace ws = make_workspace(mesh);
  const double dt = grid.dt();

  const Field rhs_p = p_row_rhs(mesh, phys, dt, ws, state.h.level(k),
                                state.mu.level(k + 1), next.p, next.q);
  const Field rhs_r = Field(ws.mass.apply(next.r));

  return solve_transposed_system(mesh, phys, dt, ws, state.h.level(k - 1),
                                 rhs_p, rhs_r, k);
}

AdjointTrajectory run_adjoint(const Mesh& mesh, const PhysParams& phys,
                              const TimeGrid& grid, const StateTrajectory& state,
                              const Field& hbar, int beta) {
  const int n = mesh.n_nodes();
  const int big_n = state.n_steps();
  const AdjointWorkspace ws = make_workspace(mesh);
  const double dt = grid.dt();

  AdjointTrajectory adj;
  adj.p = SpaceTimeField(big_n + 1, n);
  adj.q = SpaceTimeField(big_n + 1, n);
  adj.r = SpaceTimeField(big_n + 1, n);

  AdjointLevel current = terminal_solve(mesh, phys, grid, state, hbar, beta);
  adj.p.assign_level(big_n, current.p);
  adj.q.assign_level(big_n, current.q);
  adj.r.assign_level(big_n, current.r);

  for (int k = big_n - 1; k >= 1; --k) {
    const Field rhs_p = p_row_rhs(mesh, phys, dt, ws, state.h.level(k),
                                  state.mu.level(k + 1), current.p, current.q);
    const Field rhs_r = Field(ws.mass.apply(current.r));
    current = solve_transposed_system(mesh, phys, dt, ws, state.h.level(k - 1),
                                      rhs_p, rhs_r, k);
    adj.p.assign_level(k, current.p);
    adj.q.assign_level(k, current.q);
    adj.r.assign_level(k, current.r);
  }

  // Level 0: sensitivities to the initial data. The initial potential level is
  // purely algebraic, so its multiplier vanishes; the substrate multiplier
  // carries over, and the film multiplier needs one mass solve.
  const Field rhs_p0 = p_row_rhs(mesh, phys, dt, ws, state.h.level(0),
                                 state.mu.level(1), current.p, current.q);
  const Field p0 = BandedLU(ws.mass).solve(rhs_p0);
  adj.p.assign_level(0, p0);
  adj.r.assign_level(0, current.r);
  return adj;
}

}  // namespace thinfilm
