#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fw/commands.hpp"
#include "fw/errors.hpp"

using namespace fw;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fw_test_commands_" + name);
  fs::remove_all(d);
  return d;
}

Scenario small(const std::string& profile, const fs::path& dir) {
  Scenario s;
  s.config.grid = Grid(10.0, 201);
  s.profile = parse_profile(profile);
  s.output_dir = dir.string();
  s.snapshots = 3;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(InitialDataError("x")) == kExitGuard);
  CHECK(exit_code_for(GuardBreach("q <= floor", 0.1, 3, 2)) == kExitGuard);
  CHECK(exit_code_for(FlowMapError("x")) == kExitGuard);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitConfig);
}

TEST_CASE("resolve_output_dir honours FW_OUTPUT_DIR") {
  Scenario s;
  s.output_dir = "from_config";
  ::unsetenv("FW_OUTPUT_DIR");
  CHECK(resolve_output_dir(s) == "from_config");
  ::setenv("FW_OUTPUT_DIR", "", 1);
  CHECK(resolve_output_dir(s) == "from_config");
  ::setenv("FW_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir(s) == "/tmp/elsewhere");
  ::unsetenv("FW_OUTPUT_DIR");
}

TEST_CASE("describe lists the geometry") {
  const std::string d = describe(ball_geometry(GridFunction::zeros(Grid(5.0, 11)), 0.1));
  CHECK(d.find("T_theoretical") != std::string::npos);
  CHECK(d.find("0.0818181818181818") != std::string::npos);
}

TEST_CASE("run_solve writes the requested files") {
  const fs::path dir = fresh_dir("solve");
  std::ostringstream out;
  CHECK(run_solve(small("gaussian:a=0.1,sigma=1", dir), out) == kExitOk);
  CHECK(out.str().find("T_theoretical") != std::string::npos);
  for (const char* f : {"summary.json", "series.csv"}) CHECK(fs::exists(dir / f));
  int snaps = 0, maps = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string n = e.path().filename().string();
    snaps += n.rfind("snapshot_", 0) == 0;
    maps += n.rfind("flowmap_", 0) == 0;
  }
  CHECK(snaps == 3);
  CHECK(maps == 3);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j.contains("geometry"));
  CHECK_FALSE(fs::exists(dir / "kernels.csv"));

  const fs::path again = fresh_dir("solve_again");
  Scenario s = small("gaussian:a=0.1,sigma=1", again);
  (void)run_solve(s, out);
  CHECK(slurp(dir / "series.csv") == slurp(again / "series.csv"));
}

TEST_CASE("run_solve with dump_kernels and reduced diagnostics") {
  const fs::path dir = fresh_dir("kernels");
  Scenario s = small("gaussian(0.1, 1)", dir);
  s.dump_kernels = true;
  s.diagnostics = {"series"};
  std::ostringstream out;
  CHECK(run_solve(s, out) == kExitOk);
  CHECK(fs::exists(dir / "kernels.csv"));
  CHECK(fs::exists(dir / "series.csv"));
  CHECK_FALSE(fs::exists(dir / "snapshot_000000.csv"));
}

TEST_CASE("run_solve rejects kinked data in enforce mode") {
  const fs::path dir = fresh_dir("peakon");
  Scenario s = small("peakon", dir);
  s.config.grid = Grid(40.0, 801);
  std::ostringstream out;
  CHECK_THROWS_AS(run_solve(s, out), InitialDataError);
}

TEST_CASE("verify on zero data passes every check") {
  const fs::path dir = fresh_dir("verify_zero");
  Scenario s = small("zero", dir);
  const VerifyReport r = verify_scenario(s);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
  CHECK(r.all_passed());
  std::ostringstream out;
  CHECK(run_verify(s, out) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
  CHECK(j["passed"] == true);
}

TEST_CASE("verify fails an under-resolved Gaussian") {
  const fs::path dir = fresh_dir("verify_coarse");
  Scenario s = small("gaussian(0.1, 1)", dir);
  s.config.grid = Grid(10.0, 51);
  std::ostringstream out;
  CHECK(run_verify(s, out) == kExitVerify);
  CHECK(out.str().find("FAIL") != std::string::npos);
}

TEST_CASE("run_continuity and run_breaking write json") {
  const fs::path dir = fresh_dir("cont");
  Scenario s = small("gaussian(0.1, 1)", dir);
  ContinuityRequest req;
  req.perturbation = parse_profile("gaussian(0.1, 0.5, 1)");
  req.eps_values = {1e-2, 1e-3};
  std::ostringstream out;
  CHECK(run_continuity(s, req, out) == kExitOk);
  CHECK(fs::exists(dir / "continuity.json"));
  CHECK(fs::exists(dir / "continuity.csv"));

  Scenario b = small("sech2(3, 2)", fresh_dir("breaking"));
  b.config.guard_mode = GuardMode::warn;
  BreakingRequest br;
  br.t_max = 5.0;
  CHECK(run_breaking(b, br, out) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(fs::path(b.output_dir) / "breaking.json"));
  CHECK(j["runs"][0]["breach"] == true);
  CHECK(j["runs"][0]["t"].is_number());

  b.config.guard_mode = GuardMode::enforce;
  CHECK_THROWS_AS(run_breaking(b, br, out), ConfigError);
}
