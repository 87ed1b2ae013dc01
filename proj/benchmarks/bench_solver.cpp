#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "thinfilm/adjoint.hpp"
#include "thinfilm/assembly.hpp"
#include "thinfilm/forward.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = std::numbers::pi;

Field cosine_ic(const Mesh& mesh, double amplitude) {
  Field h(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    h[i] = 1.0 + amplitude * std::cos(kPi * mesh.node(i) / mesh.length());
  }
  return h;
}

PhysParams rupture_phys() {
  PhysParams phys;
  phys.tension = 0.1;
  phys.potential = Potential(0.03, 0.1);
  return phys;
}

void BM_AssembleWeightedStiffness(benchmark::State& state) {
  const Mesh mesh(3.0 * kPi, static_cast<int>(state.range(0)));
  const Field h = cosine_ic(mesh, 0.4);
  for (auto _ : state) {
    auto k = assemble_weighted_stiffness(
        mesh, quad_weight(mesh, h, [](double v) { return v * v * v; }));
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_AssembleWeightedStiffness)->Arg(128)->Arg(250);

void BM_StepMatrixFactorSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mesh mesh(3.0 * kPi, n);
  const PhysParams phys = rupture_phys();
  const Field h = cosine_ic(mesh, 0.4);
  const BandedMatrix mass = assemble_mass(mesh);
  const BandedMatrix stiffness = assemble_stiffness(mesh);
  const std::vector<double> rhs(3 * static_cast<std::size_t>(n), 1.0);
  for (auto _ : state) {
    const BandedMatrix system =
        assemble_step_matrix(mesh, phys, 0.05, h, mass, stiffness);
    auto x = BandedLU(system).solve(rhs);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_StepMatrixFactorSolve)->Arg(128)->Arg(250);

void BM_ImexStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mesh mesh(3.0 * kPi, n);
  const PhysParams phys = rupture_phys();
  ForwardIntegrator stepper(mesh, phys, 0.05, cosine_ic(mesh, 0.4), Field(n, 0.0));
  const Field zero(n, 0.0);
  for (auto _ : state) {
    stepper.advance(zero);
  }
}
BENCHMARK(BM_ImexStep)->Arg(128)->Arg(250);

void BM_ForwardHorizon(benchmark::State& state) {
  const int n = 128;
  const Mesh mesh(3.0 * kPi, n);
  const PhysParams phys = rupture_phys();
  const TimeGrid grid{5.0, 100};
  const Field h0 = cosine_ic(mesh, 0.5);
  const Field s0(n, 0.0);
  const SpaceTimeField control(grid.n_steps + 1, n);
  for (auto _ : state) {
    auto traj = run_forward(mesh, phys, grid, h0, s0, control);
    benchmark::DoNotOptimize(traj);
  }
}
BENCHMARK(BM_ForwardHorizon);

void BM_AdjointSweep(benchmark::State& state) {
  const int n = 128;
  const Mesh mesh(3.0 * kPi, n);
  const PhysParams phys = rupture_phys();
  const TimeGrid grid{5.0, 100};
  const Field h0 = cosine_ic(mesh, 0.5);
  const Field s0(n, 0.0);
  const SpaceTimeField control(grid.n_steps + 1, n);
  const StateTrajectory traj = run_forward(mesh, phys, grid, h0, s0, control);
  const Field target(n, 1.0);
  for (auto _ : state) {
    auto adj = run_adjoint(mesh, phys, grid, traj, target, 0);
    benchmark::DoNotOptimize(adj);
  }
}
BENCHMARK(BM_AdjointSweep);

}  // namespace

BENCHMARK_MAIN();
