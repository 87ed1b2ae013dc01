#pragma once

#include <span>
#include <vector>

#include "thinfilm/banded.hpp"
#include "thinfilm/mesh.hpp"

namespace thinfilm {

/// Integrand values at the 3 Gauss points of every element (3 * n_elements
/// entries). Weighted assemblies evaluate their coefficient at quadrature
/// points, so nonlinear functions of a P1 field are represented exactly up to
/// the quadrature degree rather than re-interpolated nodally.
struct QuadWeight {
  std::vector<double> values;
};

/// Gauss point g of element e, in mesh coordinates.
double gauss_point(const Mesh& mesh, int element, int g);

/// Linear interpolation of a nodal field at all Gauss points.
QuadWeight quad_weight(const Mesh& mesh, std::span<const double> field);

/// Same, with a pointwise transform applied to the interpolated value.
template <class F>
QuadWeight quad_weight(const Mesh& mesh, std::span<const double> field, F&& fn) {
  QuadWeight w = quad_weight(mesh, field);
  for (double& v : w.values) v = fn(v);
  return w;
}

/// M_ij = integral of phi_i phi_j. Symmetric tridiagonal; row sums are the
/// trapezoid weights and the total sum equals the domain length.
BandedMatrix assemble_mass(const Mesh& mesh);

/// K_ij = integral of phi_i' phi_j'. Symmetric tridiagonal; constants span the
/// null space, so every row sums to zero.
BandedMatrix assemble_stiffness(const Mesh& mesh);

BandedMatrix assemble_weighted_mass(const Mesh& mesh, const QuadWeight& w);
BandedMatrix assemble_weighted_mass(const Mesh& mesh, std::span<const double> w);

BandedMatrix assemble_weighted_stiffness(const Mesh& mesh, const QuadWeight& w);
BandedMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> w);

/// C_ij = integral of w phi_i' phi_j. Tridiagonal, generally nonsymmetric;
/// every column sums to zero because the basis derivatives sum to zero.
BandedMatrix assemble_weighted_convection(const Mesh& mesh, const QuadWeight& w);
BandedMatrix assemble_weighted_convection(const Mesh& mesh, std::span<const double> w);

/// Load vector entries integral of g phi_i by 3-point Gauss per element.
Field assemble_load(const Mesh& mesh, const QuadWeight& g);

template <class F>
Field assemble_load_fn(const Mesh& mesh, F&& g) {
  QuadWeight q;
  q.values.resize(static_cast<std::size_t>(mesh.n_elements()) * 3);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int gp = 0; gp < 3; ++gp) {
      q.values[static_cast<std::size_t>(e) * 3 + gp] = g(gauss_point(mesh, e, gp));
    }
  }
  return assemble_load(mesh, q);
}

/// u^T M v, computed element-wise (exact for P1 fields).
double mass_inner(const Mesh& mesh, std::span<const double> u,
                  std::span<const double> v);

/// Integral of a P1 field over the domain (1^T M u).
double integrate(const Mesh& mesh, std::span<const double> u);

}  // namespace thinfilm
