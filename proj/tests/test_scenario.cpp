#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "thinfilm/errors.hpp"
#include "thinfilm/runner.hpp"
#include "thinfilm/scenario.hpp"

using namespace thinfilm;

#ifndef THINFILM_CONFIG_DIR
#define THINFILM_CONFIG_DIR "configs"
#endif

namespace {

std::string minimal_cfg(const std::string& extra = "") {
  return "L = 5\nn_nodes = 32\nT = 1\nn_steps = 20\n" + extra;
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("shipped hammond config matches the catalog") {
  const std::string path = std::string(THINFILM_CONFIG_DIR) + "/hammond.cfg";
  const Scenario parsed = load_scenario(path);
  CHECK(parsed.name == "hammond");
  CHECK(parsed.length == doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(parsed.horizon == 5.0);
  CHECK(parsed.h_amplitude == 0.5);
  CHECK(parsed.beta == 1);
  CHECK(parsed.alpha == 1e-6);
  CHECK(parsed.tol == 1e-4);
  REQUIRE(parsed.target.has_value());
  CHECK(parsed.target->kind == TargetSpec::Kind::Steady);
  CHECK(parsed.target->pre_horizon == 900.0);
  CHECK(same_config(parsed, builtin_scenario("hammond")));
}

TEST_CASE("every shipped config matches its catalog entry") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const std::string path = std::string(THINFILM_CONFIG_DIR) + "/" + name + ".cfg";
    REQUIRE(std::filesystem::exists(path));
    CHECK(same_config(load_scenario(path), builtin_scenario(name)));
  }
}

TEST_CASE("validation failures carry the offending key") {
  CHECK_THROWS_WITH_AS(parse_scenario(minimal_cfg("alpha = 0\n"), "t"),
                       doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario(minimal_cfg("beta = 2\n"), "t"),
                       doctest::Contains("beta"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario(minimal_cfg("volume = 3\n"), "t"),
                       doctest::Contains("volume"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("n_nodes = 32\nT = 1\nn_steps = 20\n", "t"),
                       doctest::Contains("'L'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario(minimal_cfg("L = 5\n"), "t"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(minimal_cfg("eps = -1\n"), "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(minimal_cfg("n_nodes = 2.5\n"), "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(minimal_cfg("target = nonsense(1)\n"), "t"),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario(minimal_cfg("target = file:/no/such/file.csv\n"), "t"),
                  ConfigError);
}

TEST_CASE("comments and spacing are tolerated") {
  const Scenario s = parse_scenario(
      "# experiment\n"
      "L = 5   # domain length\n"
      "\n"
      "n_nodes = 32\n"
      "T=1\n"
      "n_steps =20\n"
      "target = wave(0.25, 2)\n",
      "inline");
  CHECK(s.length == 5.0);
  CHECK(s.n_steps == 20);
  REQUIRE(s.target.has_value());
  CHECK(s.target->amplitude == 0.25);
  CHECK(s.target->mode == 2.0);
}

TEST_CASE("serialize then parse is the identity on the catalog") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const Scenario original = builtin_scenario(name);
    const std::string text = serialize_scenario(original);
    const Scenario reparsed = parse_scenario(text, name);
    CHECK(same_config(original, reparsed));
    // serialization is idempotent
    CHECK(serialize_scenario(reparsed) == text);
  }
}

TEST_CASE("catalog covers the full experiment set") {
  const auto names = scenario_names();
  CHECK(names.size() == 7);
  CHECK_THROWS_AS(builtin_scenario("no-such-experiment"), ConfigError);

  const Scenario rupture = builtin_scenario("rupture-accelerate");
  CHECK(rupture.beta == 0);
  CHECK(rupture.hamaker == 0.03);
  CHECK(rupture.eps == 0.1);
  CHECK(rupture.horizon == 30.0);
  CHECK(rupture.target->pre_horizon == 550.0);

  const Scenario derupture = builtin_scenario("de-rupture");
  CHECK(derupture.h_init.kind == HInitSpec::Kind::Steady);
  CHECK(derupture.target->kind == TargetSpec::Kind::FlatMassMatched);

  const Scenario jensen = builtin_scenario("jensen-flatten");
  CHECK(jensen.bond == 0.0);
  CHECK(jensen.length == 10.0);
  CHECK(jensen.h_init.kind == HInitSpec::Kind::Gaussian);

  const Scenario topo = builtin_scenario("given-topography");
  CHECK(topo.substrate.kind == SubstrateSpec::Kind::Tanh);
  CHECK(topo.substrate.a == -0.25);
  CHECK(topo.substrate.d == -0.2);
  CHECK(topo.substrate.c1 == doctest::Approx(-0.35 * 3.0 * std::numbers::pi));
  CHECK(topo.substrate.c2 == doctest::Approx(0.65 * 3.0 * std::numbers::pi));

  const Scenario hold = builtin_scenario("hold-linear-state");
  CHECK(hold.length == doctest::Approx(7.5 * std::numbers::pi));
  CHECK(hold.h_mode == 3.0);
  CHECK(hold.horizon == 10.0);
}

TEST_CASE("control horizon shortens the optimization grid") {
  Scenario s = parse_scenario(minimal_cfg("control_horizon = 0.5\n"), "t");
  CHECK(s.grid().n_steps == 20);
  CHECK(s.control_grid().n_steps == 10);
  CHECK(s.control_grid().dt() == doctest::Approx(s.grid().dt()));

  const Scenario plain = parse_scenario(minimal_cfg(), "t");
  CHECK(plain.control_grid().n_steps == plain.grid().n_steps);
}

TEST_CASE("file-backed targets resolve against the mesh") {
  const Scenario base = parse_scenario(minimal_cfg(), "t");
  const Mesh mesh = base.make_mesh();
  Field values(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) values[i] = 1.0 + 0.01 * i;

  const std::string path =
      (std::filesystem::temp_directory_path() / "thinfilm_target_test.csv").string();
  write_field_csv(path, mesh, values);

  const Scenario with_file =
      parse_scenario(minimal_cfg("target = file:" + path + "\n"), "t");
  const ResolvedScenario resolved = resolve_scenario(with_file, true);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    CHECK(resolved.hbar[i] == doctest::Approx(values[i]).epsilon(1e-15));
  }
  std::remove(path.c_str());
}

TEST_SUITE_END();
