#include "varint/errors.hpp"
#include "varint/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace varint;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("varint_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig short_kepler(const std::string& integrator) {
  ExperimentConfig cfg;
  cfg.set("integrator", integrator);
  cfg.set("e", "0.5");
  cfg.set("T_final", "0.5");
  return cfg;
}

}  // namespace

TEST_CASE("config keys, defaults and assignment") {
  ExperimentConfig cfg;
  CHECK(cfg.get("problem") == "kepler");
  CHECK(cfg.get("integrator") == "epavi");
  CHECK(cfg.get("h0") == "0.001");
  CHECK(cfg.get("digits") == "16");
  for (const auto& key : ExperimentConfig::keys()) CHECK_NOTHROW(cfg.get(key));
  cfg.assign("e=0.3");
  CHECK(cfg.get("e") == "0.3");
  cfg.assign("q0 = 1, 2");
  CHECK_THROWS_AS(cfg.assign("no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(cfg.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.get("bogus"), ConfigError);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# orbit\n\nproblem=kepler\ne = 0.7\nintegrator=avi2\n";
  }
  const auto cfg = load_config_file((dir / "run.cfg").string());
  CHECK(cfg.get("e") == "0.7");
  CHECK(cfg.get("integrator") == "avi2");
  {
    std::ofstream f(dir / "bad.cfg");
    f << "colour=blue\n";
  }
  CHECK_THROWS_AS(load_config_file((dir / "bad.cfg").string()), ConfigError);
  CHECK_THROWS(load_config_file((dir / "missing.cfg").string()));
  fs::remove_all(dir);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate_config(ExperimentConfig{}));
  auto invalid = [](std::initializer_list<const char*> assignments) {
    ExperimentConfig cfg;
    for (const char* a : assignments) cfg.assign(a);
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  };
  invalid({"problem=planet"});
  invalid({"integrator=rk4"});
  invalid({"digits=5"});
  invalid({"h0=0"});
  invalid({"h0=-0.1"});
  invalid({"tol=abc"});
  invalid({"e=1"});
  invalid({"e=-0.1"});
  invalid({"T_final=3", "periods=1"});
  invalid({"problem=oscillator", "periods=2"});
  invalid({"max_iter=2.5"});
  invalid({"profile_c=1"});
  invalid({"q0=1,0"});
  invalid({"problem=pendulum", "q0=1,2"});
  invalid({"problem=oscillator", "bea_steps=0.1,0.05,0.025"});
  invalid({"problem=oscillator", "bea_steps=0.1,0.2,0.025,0.01"});
  CHECK(problem_names().size() == 4);
  CHECK(integrator_names().size() == 5);
  CHECK(suite_names().size() == 5);
}

TEST_CASE("every integrator runs a short Kepler arc") {
  for (const auto& name : integrator_names()) {
    CAPTURE(name);
    const auto out = run_experiment(short_kepler(name));
    CHECK(out.complete);
    CHECK(out.met_tolerance);
    CHECK_FALSE(out.error.has_value());
    CHECK(out.dim == 2);
    CHECK(out.t.back() >= 0.5);
    CHECK(out.q.size() == out.t.size());
    REQUIRE(out.find("max_energy_error"));
    CHECK(std::stod(*out.find("max_energy_error")) < 1e-3);
    CHECK_FALSE(out.find("no_such_key"));
  }
}

TEST_CASE("runs write their output bundle and are reproducible") {
  const fs::path a = scratch("bundle_a"), b = scratch("bundle_b");
  auto cfg = short_kepler("avi1");
  cfg.set("output", a.string());
  run_experiment(cfg);
  cfg.set("output", b.string());
  run_experiment(cfg);
  for (const char* file : {"trajectory.csv", "energy_error.csv", "traj_error.csv", "stats.csv", "summary.txt", "plot.py"}) {
    CAPTURE(file);
    CHECK(fs::exists(a / file));
  }
  for (const char* file : {"trajectory.csv", "energy_error.csv", "traj_error.csv", "stats.csv"})
    CHECK(slurp(a / file) == slurp(b / file));
  const std::string traj = slurp(a / "trajectory.csv");
  CHECK(traj.rfind("k,t,", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("numerical failures are reported with the partial trajectory") {
  auto cfg = short_kepler("epavi");
  cfg.set("tol", "1e-30");
  cfg.set("max_iter", "3");
  const auto out = run_experiment(cfg);
  CHECK_FALSE(out.complete);
  CHECK_FALSE(out.met_tolerance);
  REQUIRE(out.error.has_value());
  CHECK(*out.error == ErrorCode::NonConvergence);
  CHECK_FALSE(out.diagnosis.empty());
  CHECK(out.t.size() >= 1);
  ExperimentConfig bad;
  bad.set("integrator", "rk4");
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("extended-precision runs") {
  auto cfg = short_kepler("epavi");
  cfg.set("digits", "18");
  cfg.set("tol", "1e-17");
  cfg.set("h0", "0.01");
  const auto out = run_experiment(cfg);
  CHECK(out.met_tolerance);
  CHECK(std::stod(*out.find("max_energy_error")) <= 1e-16);
}

TEST_CASE("suites record member failures and keep going") {
  const fs::path root = scratch("suite");
  const auto good = run_suite("fig_e01", root.string(), 2, {"periods=0.02"});
  CHECK(good.members.size() == 3);
  CHECK(good.failed == 0);
  CHECK(fs::exists(root / "comparison.csv"));
  for (const auto& m : good.members) CHECK(fs::exists(root / m.name / "summary.txt"));

  const auto broken = run_suite("fig_e01", root.string(), 1, {"periods=0.02", "tol=1e-30", "max_iter=3"});
  CHECK(broken.members.size() == 3);
  CHECK(broken.failed == 3);
  const auto misconfigured = run_suite("fig_e01", root.string(), 1, {"digits=5"});
  CHECK(misconfigured.failed == 3);
  for (const auto& m : misconfigured.members) CHECK_FALSE(m.failure.empty());
  CHECK_THROWS_AS(run_suite("nope", root.string(), 1, {}), ConfigError);
  fs::remove_all(root);
}

TEST_CASE("BEA study through the configuration layer") {
  const fs::path dir = scratch("bea");
  ExperimentConfig cfg;
  cfg.set("problem", "oscillator");
  cfg.set("output", dir.string());
  const auto out = run_bea(cfg);
  CHECK(out.delta_a.size() == 4);
  CHECK(out.slope_off == doctest::Approx(3.0).epsilon(0.1));
  CHECK(out.slope_on == doctest::Approx(5.0).epsilon(0.06));
  CHECK(fs::exists(dir / "bea.csv"));
  ExperimentConfig kepler;
  CHECK_THROWS_AS(run_bea(kepler), ConfigError);
  fs::remove_all(dir);
}
