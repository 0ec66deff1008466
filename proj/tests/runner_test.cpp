#include "pmelab/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pmelab;

namespace {

json small_config() {
  return json::parse(R"({
    "name": "runner_test",
    "seed": 7,
    "scenarios": [{
      "name": "mini",
      "solver": {"m": 2.0, "dim": 1, "points": [32],
                 "initial": {"type": "sine", "base": 1.0, "amplitude": 0.2},
                 "T": 0.2, "dt": 0.0001, "record_stride": 200},
      "fbsde": {"T": 0.1, "dt": 0.001, "n_paths": 200, "x0": [0.25]},
      "checks": [{"id": "thm3"}, {"id": "bsde_residual"},
                 {"id": "equivalence_audit"}]
    }]
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("catalog lists every documented check id") {
  const json cat = check_catalog();
  const std::vector<std::string> expected = {
      "est1", "thm3", "e671", "thm6",
      "thm1_case1", "thm1_case2", "thm1_case3", "thm1_case4",
      "ab_diagnostic", "bsde_residual", "submartingale_z2", "submartingale_m",
      "q_integral", "flow_z", "equivalence_audit"};
  for (const std::string& id : expected) {
    bool found = false;
    for (const json& e : cat) found = found || e["id"] == id;
    CHECK_MESSAGE(found, "missing catalog id: ", id);
  }
  // every catalog id validates inside a config
  for (const json& e : cat) {
    json cfg = small_config();
    cfg["scenarios"][0]["checks"] = json::array({json{{"id", e["id"]}}});
    CHECK_NOTHROW(validate_config(cfg));
  }
}

TEST_CASE("config validation names the offending field") {
  json cfg = small_config();
  cfg.erase("name");
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = small_config();
  cfg["scenarios"][0]["checks"].push_back(json{{"id", "no_such_check"}});
  try {
    validate_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("no_such_check") != std::string::npos);
  }

  cfg = small_config();
  cfg["scenarios"][0].erase("solver");
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = small_config();
  cfg["scenarios"] = json::array();
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("run executes checks, writes reports, and is deterministic") {
  const json cfg = small_config();
  const std::string d1 = "runner_test_out1", d2 = "runner_test_out2";
  const RunResult r1 = run_config(cfg, d1);
  const RunResult r2 = run_config(cfg, d2);
  CHECK(r1.exit_code == 0);
  CHECK(r1.report["overall_pass"].get<bool>());
  CHECK(r1.report["checks"].size() == 3);
  CHECK(slurp(std::filesystem::path(d1) / "report.json") ==
        slurp(std::filesystem::path(d2) / "report.json"));
  CHECK(std::filesystem::exists(std::filesystem::path(d1) / "mini__thm3.csv"));
  CHECK(std::filesystem::exists(std::filesystem::path(d1) / "timing.json"));
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("regime-invalid checks are reported but not counted") {
  json cfg = small_config();
  // m = 3.5 lies outside case 1 (needs m < 1 + 2/n = 3)
  cfg["scenarios"][0]["solver"]["m"] = 3.5;
  cfg["scenarios"][0]["solver"]["dt"] = 0.00002;
  cfg["scenarios"][0]["solver"]["record_stride"] = 1000;
  cfg["scenarios"][0]["checks"] = json::array({json{{"id", "thm1_case1"}}});
  const std::string d = "runner_test_out3";
  const RunResult r = run_config(cfg, d);
  CHECK(r.exit_code == 0);
  CHECK_FALSE(r.report["checks"][0]["regime_valid"].get<bool>());
  std::filesystem::remove_all(d);
}
