#pragma once

// Independent reference implementations used only by the tests: brute-force
// quadrature, dense assembly of the discrete systems, a dense LU solve, and a
// dense forward/adjoint integrator. Everything here is deliberately written
// against different primitives than the library (dense storage, [-1,1] Gauss
// mapping, partial pivoting) so agreement is meaningful.

#include <functional>
#include <vector>

#include "thinfilm/forward.hpp"
#include "thinfilm/mesh.hpp"

namespace oracle {

using thinfilm::Field;
using thinfilm::Mesh;
using thinfilm::PhysParams;
using thinfilm::SpaceTimeField;

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;

  explicit DenseMatrix(int order) : n(order), a(static_cast<std::size_t>(order) * order, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  std::vector<double> apply(const std::vector<double>& x) const;
  DenseMatrix transposed() const;
};

/// Composite midpoint rule with compensated summation.
double midpoint_integral(const std::function<double(double)>& f, double a,
                         double b, long subintervals);

/// P1 hat function and derivative on a uniform mesh.
double hat(const Mesh& mesh, int i, double x);
double hat_deriv(const Mesh& mesh, int i, double x);

enum class Form { MassLike, StiffnessLike, ConvectionLike };

/// Dense matrix of integral w(x) phi_i^(d1) phi_j^(d2) dx by composite
/// midpoint quadrature over each element.
DenseMatrix quadrature_matrix(const Mesh& mesh,
                              const std::function<double(double)>& weight,
                              Form form, long subintervals_per_element);

/// Load vector integral g(x) phi_i dx by composite midpoint quadrature.
Field quadrature_load(const Mesh& mesh, const std::function<double(double)>& g,
                      long subintervals_per_element);

/// Piecewise-linear interpolant of nodal values.
std::function<double(double)> p1_interpolant(const Mesh& mesh, Field values);

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b);

// --- dense reference of the discrete scheme -------------------------------
// Same equations and the same 3-point quadrature definition as the library,
// assembled densely through an independent [-1,1] Gauss mapping.

DenseMatrix dense_mass(const Mesh& mesh);
DenseMatrix dense_stiffness(const Mesh& mesh);
DenseMatrix dense_weighted_stiffness(const Mesh& mesh,
                                     const std::function<double(double)>& w);
DenseMatrix dense_weighted_mass(const Mesh& mesh,
                                const std::function<double(double)>& w);
DenseMatrix dense_weighted_convection(const Mesh& mesh,
                                      const std::function<double(double)>& w);
Field dense_load(const Mesh& mesh, const std::function<double(double)>& g);

/// Coupled step matrix with (h_i, mu_i, s_i) interleaving.
DenseMatrix dense_step_matrix(const Mesh& mesh, const PhysParams& phys, double dt,
                              const Field& h_level);

struct DenseState {
  Field h, mu, s;
};

DenseState dense_imex_step(const Mesh& mesh, const PhysParams& phys, double dt,
                           const Field& h, const Field& s, const Field& f_next);

struct DenseTrajectory {
  std::vector<Field> h, mu, s;
};

DenseTrajectory dense_run_forward(const Mesh& mesh, const PhysParams& phys,
                                  double dt, int n_steps, const Field& h0,
                                  const Field& s0, const SpaceTimeField& control);

struct DenseAdjoint {
  std::vector<Field> p, q, r;  // levels 0..N, level 0 zero-filled except p/r fill
};

DenseAdjoint dense_run_adjoint(const Mesh& mesh, const PhysParams& phys, double dt,
                               const DenseTrajectory& state, const Field& hbar,
                               int beta);

}  // namespace oracle
