#include "thinfilm/assembly.hpp"

#include <array>
#include <stdexcept>

namespace thinfilm {

namespace {

// 3-point Gauss-Legendre on the unit interval; exact through degree 5, which
// covers P1 basis products against cubic point-evaluated weights.
constexpr std::array<double, 3> kGaussT = {0.11270166537925831, 0.5,
                                           0.88729833462074169};
constexpr std::array<double, 3> kGaussW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void check_weight(const Mesh& mesh, std::size_t n, const char* what) {
  if (n != static_cast<std::size_t>(mesh.n_nodes())) {
    throw std::invalid_argument(std::string(what) + ": weight length mismatch");
  }
}

void check_quad(const Mesh& mesh, const QuadWeight& w, const char* what) {
  if (w.values.size() != static_cast<std::size_t>(mesh.n_elements()) * 3) {
    throw std::invalid_argument(std::string(what) + ": quadrature weight size mismatch");
  }
}

}  // namespace

double gauss_point(const Mesh& mesh, int element, int g) {
  return (static_cast<double>(element) + kGaussT[g]) * mesh.dx();
}

QuadWeight quad_weight(const Mesh& mesh, std::span<const double> field) {
  check_weight(mesh, field.size(), "quad_weight");
  QuadWeight w;
  w.values.resize(static_cast<std::size_t>(mesh.n_elements()) * 3);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double a = field[e];
    const double b = field[e + 1];
    for (int g = 0; g < 3; ++g) {
      const double t = kGaussT[g];
      w.values[static_cast<std::size_t>(e) * 3 + g] = a * (1.0 - t) + b * t;
    }
  }
  return w;
}

BandedMatrix assemble_mass(const Mesh& mesh) {
  BandedMatrix m(mesh.n_nodes(), 1);
  const double dx = mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    m.add(e, e, dx / 3.0);
    m.add(e, e + 1, dx / 6.0);
    m.add(e + 1, e, dx / 6.0);
    m.add(e + 1, e + 1, dx / 3.0);
  }
  return m;
}

BandedMatrix assemble_stiffness(const Mesh& mesh) {
  BandedMatrix k(mesh.n_nodes(), 1);
  const double inv = 1.0 / mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    k.add(e, e, inv);
    k.add(e, e + 1, -inv);
    k.add(e + 1, e, -inv);
    k.add(e + 1, e + 1, inv);
  }
  return k;
}

BandedMatrix assemble_weighted_mass(const Mesh& mesh, const QuadWeight& w) {
  check_quad(mesh, w, "assemble_weighted_mass");
  BandedMatrix m(mesh.n_nodes(), 1);
  const double dx = mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double m00 = 0.0, m01 = 0.0, m11 = 0.0;
    for (int g = 0; g < 3; ++g) {
      const double t = kGaussT[g];
      const double c = kGaussW[g] * w.values[static_cast<std::size_t>(e) * 3 + g] * dx;
      m00 += c * (1.0 - t) * (1.0 - t);
      m01 += c * (1.0 - t) * t;
      m11 += c * t * t;
    }
    m.add(e, e, m00);
    m.add(e, e + 1, m01);
    m.add(e + 1, e, m01);
    m.add(e + 1, e + 1, m11);
  }
  return m;
}

BandedMatrix assemble_weighted_mass(const Mesh& mesh, std::span<const double> w) {
  return assemble_weighted_mass(mesh, quad_weight(mesh, w));
}

BandedMatrix assemble_weighted_stiffness(const Mesh& mesh, const QuadWeight& w) {
  check_quad(mesh, w, "assemble_weighted_stiffness");
  BandedMatrix k(mesh.n_nodes(), 1);
  const double inv = 1.0 / mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double wsum = 0.0;
    for (int g = 0; g < 3; ++g) {
      wsum += kGaussW[g] * w.values[static_cast<std::size_t>(e) * 3 + g];
    }
    const double kloc = wsum * inv;
    k.add(e, e, kloc);
    k.add(e, e + 1, -kloc);
    k.add(e + 1, e, -kloc);
    k.add(e + 1, e + 1, kloc);
  }
  return k;
}

BandedMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> w) {
  return assemble_weighted_stiffness(mesh, quad_weight(mesh, w));
}

BandedMatrix assemble_weighted_convection(const Mesh& mesh, const QuadWeight& w) {
  check_quad(mesh, w, "assemble_weighted_convection");
  BandedMatrix c(mesh.n_nodes(), 1);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    // phi_e' = -1/dx, phi_{e+1}' = +1/dx; the dx of the quadrature cancels.
    double c00 = 0.0, c01 = 0.0, c10 = 0.0, c11 = 0.0;
    for (int g = 0; g < 3; ++g) {
      const double t = kGaussT[g];
      const double cw = kGaussW[g] * w.values[static_cast<std::size_t>(e) * 3 + g];
      c00 += cw * -(1.0 - t);
      c01 += cw * -t;
      c10 += cw * (1.0 - t);
      c11 += cw * t;
    }
    c.add(e, e, c00);
    c.add(e, e + 1, c01);
    c.add(e + 1, e, c10);
    c.add(e + 1, e + 1, c11);
  }
  return c;
}

BandedMatrix assemble_weighted_convection(const Mesh& mesh, std::span<const double> w) {
  return assemble_weighted_convection(mesh, quad_weight(mesh, w));
}

Field assemble_load(const Mesh& mesh, const QuadWeight& g) {
  check_quad(mesh, g, "assemble_load");
  Field load(mesh.n_nodes(), 0.0);
  const double dx = mesh.dx();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double l0 = 0.0, l1 = 0.0;
    for (int gp = 0; gp < 3; ++gp) {
      const double t = kGaussT[gp];
      const double c = kGaussW[gp] * g.values[static_cast<std::size_t>(e) * 3 + gp] * dx;
      l0 += c * (1.0 - t);
      l1 += c * t;
    }
    load[e] += l0;
    load[e + 1] += l1;
  }
  return load;
}

double mass_inner(const Mesh& mesh, std::span<const double> u,
                  std::span<const double> v) {
  check_weight(mesh, u.size(), "mass_inner");
  check_weight(mesh, v.size(), "mass_inner");
  const double dx6 = mesh.dx() / 6.0;
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    acc += dx6 * (2.0 * u[e] * v[e] + u[e] * v[e + 1] + u[e + 1] * v[e] +
                  2.0 * u[e + 1] * v[e + 1]);
  }
  return acc;
}

double integrate(const Mesh& mesh, std::span<const double> u) {
  check_weight(mesh, u.size(), "integrate");
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    acc += 0.5 * mesh.dx() * (u[e] + u[e + 1]);
  }
  return acc;
}

}  // namespace thinfilm
