#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinfilm/forward.hpp"
#include "thinfilm/mesh.hpp"

namespace thinfilm {

/// Initial film profile. The cosine family takes its amplitude and mode from
/// the ic.h_amplitude / ic.mode keys; steady(T_pre) runs the uncontrolled
/// system from that cosine state for T_pre and starts from the result.
struct HInitSpec {
  enum class Kind { Cosine, Gaussian, Steady, File };
  Kind kind = Kind::Cosine;
  double gauss_amplitude = 0.0;  // gaussian(a, w): 1 + a exp(-(w x)^2)
  double gauss_width = 1.0;
  double pre_horizon = 0.0;      // steady(T_pre)
  std::string path;              // file:<path>
};

struct SubstrateSpec {
  enum class Kind { Flat, Tanh, File };
  Kind kind = Kind::Flat;
  double a = 0.0, c1 = 0.0, c2 = 0.0, d = 1.0;  // a (tanh((x+c1)/d) - tanh((x-c2)/d))
  std::string path;
};

struct TargetSpec {
  enum class Kind { Steady, Flat, FlatMassMatched, Wave, File };
  Kind kind = Kind::Flat;
  double pre_horizon = 0.0;              // steady(T_pre)
  double value = 1.0;                    // flat(value); flat() matches the film mass
  double amplitude = 0.2;                // wave(a_t, m_t)
  double mode = 2.0;
  std::string path;
};

/// One experiment: physics, discretization, initial data, target, and
/// optimizer settings.
struct Scenario {
  std::string name;

  double length = 0.0;
  int n_nodes = 0;
  double horizon = 0.0;
  int n_steps = 0;

  double capillary = 1.0;
  double bond = 1.0;
  double tension = 0.1;
  double damping = 0.0;
  double hamaker = 0.0;
  double eps = 0.1;

  double alpha = 1e-6;
  int beta = 1;
  double tol = 1e-4;
  int k_max = 300;
  double lambda0 = 1.0;

  double h_amplitude = 0.0;
  double h_mode = 1.0;
  HInitSpec h_init;
  SubstrateSpec substrate;
  std::optional<TargetSpec> target;
  std::optional<double> control_horizon;

  PhysParams phys() const;
  Mesh make_mesh() const;
  /// Grid for forward runs over the full horizon.
  TimeGrid grid() const;
  /// Grid for optimization; honors control_horizon at the same step size.
  TimeGrid control_grid() const;
};

/// Parses the flat key = value format (utf-8, '#' comments). Unknown or
/// duplicate keys and invariant violations raise ConfigError with the key and
/// line. `source` names the input in error messages.
Scenario parse_scenario(const std::string& text, const std::string& source);
Scenario load_scenario(const std::string& path);

/// Canonical text form; parse(serialize(s)) reproduces s field for field.
std::string serialize_scenario(const Scenario& s);

/// Field-wise equality of everything except the name.
bool same_config(const Scenario& a, const Scenario& b);

/// Built-in experiment catalog.
std::vector<std::string> scenario_names();
Scenario builtin_scenario(const std::string& name);

}  // namespace thinfilm
