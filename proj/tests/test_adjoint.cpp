#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "thinfilm/adjoint.hpp"
#include "thinfilm/optim.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = std::numbers::pi;

Field cosine_ic(const Mesh& mesh, double amplitude, double mode) {
  Field h(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    h[i] = 1.0 + amplitude * std::cos(mode * kPi * mesh.node(i) / mesh.length());
  }
  return h;
}

struct Setup {
  Mesh mesh;
  PhysParams phys;
  TimeGrid grid;
  Field h0, s0;
  StateTrajectory traj;
};

Setup make_setup(int n, int steps, double hamaker, double damping,
                 unsigned control_seed = 0) {
  Setup s{Mesh(3.0 * kPi, n), PhysParams{}, TimeGrid{0.05 * steps, steps}, {}, {}, {}};
  s.phys.capillary = 1.0;
  s.phys.bond = 1.0;
  // keep c^2 Ca >= gamma so the damped substrate coupling stays well-posed
  s.phys.tension = damping > 0.0 ? 0.6 : 0.1;
  s.phys.damping = damping;
  s.phys.potential = Potential(hamaker, 0.1);
  s.h0 = cosine_ic(s.mesh, 0.4, 1.0);
  s.s0.assign(n, 0.0);

  SpaceTimeField control(steps + 1, n);
  if (control_seed != 0) {
    std::mt19937 rng(control_seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (int k = 1; k <= steps; ++k) {
      for (auto& v : control.level(k)) v = uni(rng);
    }
  }
  s.traj = run_forward(s.mesh, s.phys, s.grid, s.h0, s.s0, control);
  return s;
}

double max_level_diff(const SpaceTimeField& a, const std::vector<Field>& b) {
  double m = 0.0;
  for (int k = 0; k < a.n_levels(); ++k) {
    for (int i = 0; i < a.n_nodes(); ++i) {
      m = std::max(m, std::abs(a.at(k, i) - b[k][i]));
    }
  }
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("adjoint");

TEST_CASE("matched target gives a zero terminal multiplier") {
  Setup s = make_setup(12, 4, 0.0, 0.0);
  const int last = s.traj.n_steps();

  for (int beta : {0, 1}) {
    Field target(s.mesh.n_nodes());
    for (int i = 0; i < s.mesh.n_nodes(); ++i) {
      target[i] = s.traj.h.at(last, i) + (beta != 0 ? s.traj.s.at(last, i) : 0.0);
    }
    const AdjointLevel terminal =
        terminal_solve(s.mesh, s.phys, s.grid, s.traj, target, beta);
    CHECK(linf_norm(terminal.p) < 1e-12);
    CHECK(linf_norm(terminal.q) < 1e-12);
    CHECK(linf_norm(terminal.r) < 1e-12);

    // and the whole backward sweep stays zero
    const AdjointTrajectory adj =
        run_adjoint(s.mesh, s.phys, s.grid, s.traj, target, beta);
    for (int k = 0; k <= last; ++k) {
      CHECK(linf_norm(adj.p.level(k)) < 1e-12);
      CHECK(linf_norm(adj.q.level(k)) < 1e-12);
      CHECK(linf_norm(adj.r.level(k)) < 1e-12);
    }
  }
}

TEST_CASE("backward sweep is linear in the terminal mismatch") {
  Setup s = make_setup(10, 5, 0.03, 0.2, 101);
  const int last = s.traj.n_steps();
  const double alpha = 2.75;

  Field base(s.mesh.n_nodes());
  for (int i = 0; i < s.mesh.n_nodes(); ++i) {
    base[i] = s.traj.h.at(last, i) + s.traj.s.at(last, i);
  }
  Field target1(base), target2(base);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-0.3, 0.3);
  for (int i = 0; i < s.mesh.n_nodes(); ++i) {
    const double d = uni(rng);
    target1[i] += d;
    target2[i] += alpha * d;
  }

  const AdjointTrajectory a1 = run_adjoint(s.mesh, s.phys, s.grid, s.traj, target1, 1);
  const AdjointTrajectory a2 = run_adjoint(s.mesh, s.phys, s.grid, s.traj, target2, 1);
  for (int k = 0; k <= last; ++k) {
    for (int i = 0; i < s.mesh.n_nodes(); ++i) {
      CHECK(a2.p.at(k, i) == doctest::Approx(alpha * a1.p.at(k, i)).epsilon(1e-10));
      CHECK(a2.q.at(k, i) == doctest::Approx(alpha * a1.q.at(k, i)).epsilon(1e-10));
      CHECK(a2.r.at(k, i) == doctest::Approx(alpha * a1.r.at(k, i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("terminal solve matches the dense reference") {
  Setup s = make_setup(8, 3, 0.03, 0.15, 7);
  const int last = s.traj.n_steps();
  Field target(s.mesh.n_nodes(), 1.0);

  oracle::DenseTrajectory ref_state;
  for (int k = 0; k <= last; ++k) {
    auto h = s.traj.h.level(k);
    auto mu = s.traj.mu.level(k);
    auto sf = s.traj.s.level(k);
    ref_state.h.emplace_back(h.begin(), h.end());
    ref_state.mu.emplace_back(mu.begin(), mu.end());
    ref_state.s.emplace_back(sf.begin(), sf.end());
  }

  for (int beta : {0, 1}) {
    const AdjointLevel terminal =
        terminal_solve(s.mesh, s.phys, s.grid, s.traj, target, beta);
    const oracle::DenseAdjoint ref = oracle::dense_run_adjoint(
        s.mesh, s.phys, s.grid.dt(), ref_state, target, beta);
    for (int i = 0; i < s.mesh.n_nodes(); ++i) {
      CHECK(std::abs(terminal.p[i] - ref.p[last][i]) < 1e-10);
      CHECK(std::abs(terminal.q[i] - ref.q[last][i]) < 1e-10);
      CHECK(std::abs(terminal.r[i] - ref.r[last][i]) < 1e-10);
    }
  }
}

TEST_CASE("full backward sweep matches the dense reference") {
  Setup s = make_setup(16, 8, 0.03, 0.25, 17);
  const int last = s.traj.n_steps();

  oracle::DenseTrajectory ref_state;
  for (int k = 0; k <= last; ++k) {
    auto h = s.traj.h.level(k);
    auto mu = s.traj.mu.level(k);
    auto sf = s.traj.s.level(k);
    ref_state.h.emplace_back(h.begin(), h.end());
    ref_state.mu.emplace_back(mu.begin(), mu.end());
    ref_state.s.emplace_back(sf.begin(), sf.end());
  }

  Field target = cosine_ic(s.mesh, 0.2, 2.0);
  for (int beta : {0, 1}) {
    const AdjointTrajectory adj =
        run_adjoint(s.mesh, s.phys, s.grid, s.traj, target, beta);
    const oracle::DenseAdjoint ref = oracle::dense_run_adjoint(
        s.mesh, s.phys, s.grid.dt(), ref_state, target, beta);
    CHECK(max_level_diff(adj.p, ref.p) < 1e-9);
    CHECK(max_level_diff(adj.q, ref.q) < 1e-9);
    CHECK(max_level_diff(adj.r, ref.r) < 1e-9);
  }
}

TEST_CASE("substrate multiplier stays finite without damping") {
  Setup s = make_setup(12, 6, 0.0, 0.0, 23);
  Field target = cosine_ic(s.mesh, 0.15, 1.0);
  const AdjointTrajectory adj = run_adjoint(s.mesh, s.phys, s.grid, s.traj, target, 1);

  oracle::DenseTrajectory ref_state;
  for (int k = 0; k <= s.traj.n_steps(); ++k) {
    auto h = s.traj.h.level(k);
    auto mu = s.traj.mu.level(k);
    auto sf = s.traj.s.level(k);
    ref_state.h.emplace_back(h.begin(), h.end());
    ref_state.mu.emplace_back(mu.begin(), mu.end());
    ref_state.s.emplace_back(sf.begin(), sf.end());
  }
  const oracle::DenseAdjoint ref =
      oracle::dense_run_adjoint(s.mesh, s.phys, s.grid.dt(), ref_state, target, 1);
  for (int k = 0; k <= s.traj.n_steps(); ++k) {
    CHECK(all_finite(adj.r.level(k)));
  }
  CHECK(max_level_diff(adj.r, ref.r) < 1e-9);
}

TEST_CASE("adjoint gradient agrees with central differences") {
  // Ground truth for the whole discrete chain: directional derivatives of the
  // reduced cost versus the weighted inner product with the adjoint gradient.
  const int n = 16, steps = 8;
  const double delta = 1e-5;

  for (double hamaker : {0.0, 0.03}) {
    for (int beta : {0, 1}) {
      CAPTURE(hamaker);
      CAPTURE(beta);
      ControlProblem problem{Mesh(3.0 * kPi, n), PhysParams{}, TimeGrid{0.4, steps},
                             {},  {},            {},           beta, 1e-6};
      problem.phys.tension = 0.1;
      problem.phys.potential = Potential(hamaker, 0.1);
      problem.h0 = cosine_ic(problem.mesh, 0.4, 1.0);
      problem.s0.assign(n, 0.0);
      problem.hbar = cosine_ic(problem.mesh, 0.1, 2.0);

      const ControlField f0 = zero_control(problem);
      const CostEval base = evaluate_cost(problem, f0);
      const ControlField gradient = reduced_gradient(problem, f0, base.trajectory);

      std::mt19937 rng(97 + beta);
      std::uniform_real_distribution<double> uni(-1.0, 1.0);
      double worst = 0.0;
      for (int d = 0; d < 20; ++d) {
        ControlField dir(steps + 1, n);
        for (int k = 1; k <= steps; ++k) {
          for (auto& v : dir.level(k)) v = uni(rng);
        }
        ControlField plus(steps + 1, n), minus(steps + 1, n);
        for (int k = 1; k <= steps; ++k) {
          for (int i = 0; i < n; ++i) {
            plus.at(k, i) = delta * dir.at(k, i);
            minus.at(k, i) = -delta * dir.at(k, i);
          }
        }
        const double fd =
            (reduced_cost(problem, plus) - reduced_cost(problem, minus)) /
            (2.0 * delta);
        const double ip = space_time_inner(problem.mesh, problem.grid, gradient, dir);
        const double scale = std::max(std::abs(fd), std::abs(ip));
        if (scale > 1e-14) worst = std::max(worst, std::abs(fd - ip) / scale);
      }
      CHECK(worst < 1e-4);
    }
  }
}

TEST_CASE("back step rejects out-of-range levels") {
  Setup s = make_setup(8, 3, 0.0, 0.0);
  const AdjointLevel dummy{Field(8, 0.0), Field(8, 0.0), Field(8, 0.0)};
  CHECK_THROWS_AS(imex_back_step(s.mesh, s.phys, s.grid, s.traj, 0, dummy),
                  std::invalid_argument);
  CHECK_THROWS_AS(imex_back_step(s.mesh, s.phys, s.grid, s.traj, 3, dummy),
                  std::invalid_argument);
}

TEST_SUITE_END();
