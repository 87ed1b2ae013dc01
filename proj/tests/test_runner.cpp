#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/runner.hpp"

using namespace thinfilm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

Scenario tiny_scenario() {
  Scenario s = builtin_scenario("wave-target");
  s.n_nodes = 32;
  s.n_steps = 10;
  s.horizon = 0.5;
  s.k_max = 5;
  return s;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("thinfilm_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("snapshots carry the exact header and flat data") {
  const Mesh mesh(2.0, 5);
  const Field ones(5, 1.0), zeros(5, 0.0);
  TempDir dir("snapshot");
  const std::string path = (dir.path / "snap.csv").string();

  write_snapshot(path, mesh, ones, zeros, zeros, zeros, false);
  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "x,h,s,H,mu,f");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].find(",1,0,1,0,0") != std::string::npos);
  }
}

TEST_CASE("mirrored snapshots reflect the surface") {
  const Mesh mesh(2.0, 5);
  Field h(5), zeros(5, 0.0);
  for (int i = 0; i < 5; ++i) h[i] = 1.0 + 0.1 * i;
  TempDir dir("mirror");
  const std::string path = (dir.path / "snap.csv").string();
  write_snapshot(path, mesh, h, zeros, zeros, zeros, true);

  const auto lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 1 + 2 * 5 - 1);  // header + 2n-1 rows

  std::vector<double> xs, hs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string cell;
    std::getline(row, cell, ',');
    xs.push_back(std::stod(cell));
    std::getline(row, cell, ',');
    hs.push_back(std::stod(cell));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == -xs[j]) CHECK(hs[i] == hs[j]);
    }
    CHECK(xs[i] > (i > 0 ? xs[i - 1] : -3.0));
  }
}

TEST_CASE("full-size snapshot has one row per node") {
  const Mesh mesh(3.0, 250);
  const Field ones(250, 1.0), zeros(250, 0.0);
  TempDir dir("rows");
  const std::string path = (dir.path / "snap.csv").string();
  write_snapshot(path, mesh, ones, zeros, zeros, zeros, false);
  CHECK(lines_of(slurp(path)).size() == 251);
}

TEST_CASE("field files round-trip through the loader") {
  const Mesh mesh(2.0, 9);
  Field values(9);
  for (int i = 0; i < 9; ++i) values[i] = std::sin(0.7 * i);
  TempDir dir("field");
  const std::string path = (dir.path / "field.csv").string();
  write_field_csv(path, mesh, values);
  const Field back = load_field_csv(path, mesh);
  for (int i = 0; i < 9; ++i) CHECK(back[i] == values[i]);

  const Mesh other(2.0, 11);
  CHECK_THROWS_AS(load_field_csv(path, other), ConfigError);
}

TEST_CASE("identical invocations produce identical artifacts") {
  const Scenario s = tiny_scenario();
  TempDir dir_a("det_a"), dir_b("det_b");
  RunOptions opts_a, opts_b;
  opts_a.out_dir = dir_a.path.string();
  opts_b.out_dir = dir_b.path.string();

  const RunSummary sum_a = run_optimize_scenario(s, opts_a);
  const RunSummary sum_b = run_optimize_scenario(s, opts_b);
  REQUIRE(sum_a.files == sum_b.files);

  for (const auto& name : sum_a.files) {
    CAPTURE(name);
    const std::string a = slurp(dir_a.path / name);
    const std::string b = slurp(dir_b.path / name);
    if (name == "summary.json") {
      // wall time is the one legitimately varying field
      auto la = lines_of(a), lb = lines_of(b);
      REQUIRE(la.size() == lb.size());
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (la[i].find("wall_time_seconds") != std::string::npos) continue;
        CHECK(la[i] == lb[i]);
      }
    } else {
      CHECK(a == b);
    }
  }
}

TEST_CASE("summary json is lossless under reparse") {
  const Scenario s = tiny_scenario();
  TempDir dir("summary");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  run_optimize_scenario(s, opts);

  const std::string text = slurp(dir.path / "summary.json");
  const nlohmann::json parsed = nlohmann::json::parse(text);
  CHECK(parsed.dump(2) + "\n" == text);
  CHECK(parsed["mode"] == "optimize");
  CHECK(parsed["config"]["L"] == 5.0);
  CHECK(parsed.contains("final_cost"));
  CHECK(parsed.contains("termination_reason"));
  CHECK(parsed.contains("wall_time_seconds"));
}

TEST_CASE("optimize run writes the iteration log") {
  const Scenario s = tiny_scenario();
  TempDir dir("optim");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  const RunSummary summary = run_optimize_scenario(s, opts);

  const auto lines = lines_of(slurp(dir.path / "optim.csv"));
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "iter,J,grad_norm,lambda,linf_err");
  CHECK(summary.final_cost.has_value());
  CHECK(summary.mode == "optimize");
  CHECK(summary.mass_drift < 1e-10);
}

TEST_CASE("damped forward runs emit the energy log") {
  Scenario s = tiny_scenario();
  s.damping = 0.1;
  s.tension = 0.4;
  TempDir dir("fwd_energy");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  const RunSummary summary = run_forward_scenario(s, opts);
  CHECK(std::find(summary.files.begin(), summary.files.end(), "energy.csv") !=
        summary.files.end());
  const auto lines = lines_of(slurp(dir.path / "energy.csv"));
  CHECK(lines[0] == "step,t,E,D_fluid,D_sub,W,residual");
  CHECK(lines.size() == static_cast<std::size_t>(s.n_steps) + 2);

  // undamped runs do not
  Scenario plain = tiny_scenario();
  TempDir dir2("fwd_noenergy");
  RunOptions opts2;
  opts2.out_dir = dir2.path.string();
  const RunSummary summary2 = run_forward_scenario(plain, opts2);
  CHECK(std::find(summary2.files.begin(), summary2.files.end(), "energy.csv") ==
        summary2.files.end());
}

TEST_CASE("energy check demands damping and writes the ledger") {
  Scenario s = tiny_scenario();
  TempDir dir("energy");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  CHECK_THROWS_AS(run_energy_check(s, opts), ConfigError);

  s.damping = 0.1;
  s.tension = 0.4;  // stable side of the substrate coupling
  const RunSummary summary = run_energy_check(s, opts);
  CHECK(summary.mode == "energy-check");
  const auto lines = lines_of(slurp(dir.path / "energy.csv"));
  CHECK(lines[0] == "step,t,E,D_fluid,D_sub,W,residual");
  CHECK(lines.size() == static_cast<std::size_t>(s.n_steps) + 2);
}

TEST_CASE("gradient check passes on a small instance") {
  Scenario s = tiny_scenario();
  s.n_nodes = 16;
  s.n_steps = 8;
  const GradCheckReport report = grad_check(s, 10, 1e-5, 42);
  CHECK(report.errors.size() == 10);
  CHECK(report.max_error < 1e-3);
  CHECK(report.pass);
}

TEST_CASE("finite-difference error shows the truncation/roundoff V") {
  // A strongly nonlinear instance gives visible third derivatives, so the
  // error curve drops quadratically with the step before roundoff takes over.
  Scenario s = tiny_scenario();
  s.n_nodes = 16;
  s.n_steps = 8;
  s.horizon = 0.4;
  s.hamaker = 0.03;
  s.eps = 0.1;
  s.h_amplitude = 0.5;

  const double coarse = grad_check(s, 5, 1e-2, 42).max_error;
  const double sweet = grad_check(s, 5, 1e-3, 42).max_error;
  const double mid = grad_check(s, 5, 1e-4, 42).max_error;
  const double fine = grad_check(s, 5, 1e-5, 42).max_error;
  const double finest = grad_check(s, 5, 1e-6, 42).max_error;

  CHECK(coarse > sweet);        // truncation limb
  CHECK(finest > sweet);        // roundoff limb
  CHECK(mid < fine);            // roundoff grows as the step shrinks
  CHECK(fine < finest);
  CHECK(sweet < 1e-9);          // the adjoint gradient is exact to solver noise
}

TEST_CASE("solver failures still leave a summary behind") {
  // gamma > c^2 Ca puts the substrate coupling on its ill-posed side, so this
  // run reliably blows up partway through.
  Scenario s = tiny_scenario();
  s.damping = 0.1;
  s.tension = 0.1;
  s.n_steps = 100;
  s.horizon = 5.0;
  TempDir dir("failcap");
  RunOptions opts;
  opts.out_dir = dir.path.string();

  CHECK_THROWS(run_forward_scenario(s, opts));
  const std::string text = slurp(dir.path / "summary.json");
  const nlohmann::json parsed = nlohmann::json::parse(text);
  const std::string reason = parsed["termination_reason"];
  CHECK(reason.rfind("error:", 0) == 0);
}

TEST_CASE("unreachable mass targets are flagged before optimizing") {
  Scenario s = tiny_scenario();
  s.beta = 0;
  TargetSpec t;
  t.kind = TargetSpec::Kind::Flat;
  t.value = 2.0;  // film mass cannot change, so this is unreachable
  s.target = t;

  const ResolvedScenario resolved = resolve_scenario(s, true);
  REQUIRE(!resolved.warnings.empty());
  bool found = false;
  for (const auto& w : resolved.warnings) {
    if (w.find("unreachable in mass") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_SUITE_END();
