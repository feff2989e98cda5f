#include "flocksim/io.hpp"
#include "flocksim/scenarios.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flocksim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "flocksim_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json fixture_json() { return nlohmann::json::parse(slurp(FLOCKSIM_FIXTURE)); }

fs::path write_json(const fs::path& dir, const nlohmann::json& doc) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST_CASE("bundled fixture parses and validates") {
  const ScenarioConfig cfg = parse_scenario(FLOCKSIM_FIXTURE);
  CHECK(cfg.N == 13);
  CHECK(cfg.malicious_id == 6);
  CHECK(cfg.malicious.k_v == 0.8);
  CHECK(cfg.malicious.k_a == 0.0);
  CHECK(cfg.malicious.k_r == 450000.0);
  CHECK(cfg.leader.delta_bar == 12.0);
  CHECK(cfg.R == doctest::Approx(18.0 * std::sqrt(2.0)));
  CHECK(cfg.mode == ControlMode::Hierarchical);
  CHECK(validate_scenario(cfg).ok());
}

TEST_CASE("fixture matches the generator") {
  const ScenarioConfig parsed = parse_scenario(FLOCKSIM_FIXTURE);
  CHECK(scenario_to_json(parsed) == scenario_to_json(reference_scenario()));
}

TEST_CASE("round trip through JSON") {
  const nlohmann::json doc = fixture_json();
  CHECK(scenario_to_json(scenario_from_json(doc)) == doc);

  ScenarioConfig cfg = randomized_scenario(4);
  cfg.leader.bar_H = 1.0e9;
  cfg.leader.orientation = 0.25;
  cfg.follower.edge_gamma[{0, 1}] = 2.0;
  cfg.follower.edge_alpha0[{1, 2}] = 0.5;
  cfg.monitor.alpha_bar = 3.0;
  cfg.leader.desired_displacements[2] = testing::vec2(-12, 0);
  const nlohmann::json out = scenario_to_json(cfg);
  CHECK(scenario_to_json(scenario_from_json(out)) == out);
}

TEST_CASE("malformed scenario files") {
  const fs::path dir = scratch("malformed");

  SUBCASE("empty file") {
    const fs::path p = dir / "empty.json";
    std::ofstream{p};
    CHECK_THROWS_AS(parse_scenario(p), ScenarioError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(parse_scenario(dir / "missing.json"), IoError);
  }
  SUBCASE("unknown key") {
    nlohmann::json doc = fixture_json();
    doc["leader"]["kappa"] = 1.0;
    CHECK_THROWS_AS(parse_scenario(write_json(dir, doc)), ScenarioError);
  }
  SUBCASE("missing key") {
    nlohmann::json doc = fixture_json();
    doc.erase("dt");
    CHECK_THROWS_AS(parse_scenario(write_json(dir, doc)), ScenarioError);
  }
  SUBCASE("wrong type") {
    nlohmann::json doc = fixture_json();
    doc["N"] = "thirteen";
    CHECK_THROWS_AS(parse_scenario(write_json(dir, doc)), ScenarioError);
  }
  SUBCASE("wrong schema version") {
    nlohmann::json doc = fixture_json();
    doc["schema_version"] = "2";
    CHECK_THROWS_AS(parse_scenario(write_json(dir, doc)), ScenarioError);
  }
  SUBCASE("unknown control mode") {
    nlohmann::json doc = fixture_json();
    doc["control_mode"] = "greedy";
    CHECK_THROWS_AS(parse_scenario(write_json(dir, doc)), ScenarioError);
  }
  SUBCASE("delta_bar beyond R/2") {
    nlohmann::json doc = fixture_json();
    doc["leader"]["delta_bar"] = 14.0;
    const fs::path p = write_json(dir, doc);
    try {
      parse_scenario(p);
      FAIL("expected a validation error");
    } catch (const ValidationError& ex) {
      CHECK(ex.report().has(kDeltaBar));
    }
    CHECK_NOTHROW(parse_scenario(p, false));
  }
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(450000.0) == "450000");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-HUGE_VAL) == "-inf");
}

TEST_CASE("output bundle") {
  ScenarioConfig cfg = reference_scenario();
  cfg.t_end = 2e-3;
  cfg.monitor.record_every = 1;
  const SimulationRecord rec = run(cfg);
  const fs::path dir = scratch("bundle");
  write_outputs(rec, cfg, dir / "a");

  std::ifstream traj(dir / "a" / "trajectory.csv");
  std::string header;
  std::getline(traj, header);
  CHECK(header == "t,agent_id,x0,x1,v0,v1,u0,u1");
  int rows = 0;
  for (std::string line; std::getline(traj, line);) ++rows;
  CHECK(rows == 3 * cfg.N);

  std::ifstream metrics(dir / "a" / "metrics.csv");
  std::getline(metrics, header);
  CHECK(header == "t,H,Upsilon,min_dist,vel_spread,containment_residual,estimator_residual,k_hat_v,k_hat_a,k_hat_r");

  const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["control_mode"] == "hierarchical");
  CHECK(summary["aborted"] == false);
  CHECK(summary.contains("containment"));
  CHECK(fs::exists(dir / "a" / "events.log"));

  // A second run writes byte-identical files.
  write_outputs(run(cfg), cfg, dir / "b");
  for (const char* name : {"trajectory.csv", "metrics.csv", "events.log", "summary.json"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
}

TEST_CASE("summary of the reference run reports containment") {
  const ScenarioConfig cfg = parse_scenario(FLOCKSIM_FIXTURE);
  const nlohmann::json summary = summary_to_json(summarize(run(cfg), cfg), cfg);
  CHECK(summary["containment"]["contained"] == true);
  CHECK(summary["velocity"]["consensus"] == true);
  CHECK(summary["safety"]["escapes"] == 0);
  CHECK(summary["energy"]["H0"].get<double>() < summary["energy"]["bar_H"].get<double>());
}

TEST_CASE("conventional summaries carry null energies") {
  ScenarioConfig cfg = reference_scenario();
  cfg.mode = ControlMode::Conventional;
  cfg.t_end = 0.01;
  const nlohmann::json summary = summary_to_json(summarize(run(cfg), cfg), cfg);
  CHECK(summary["energy"]["H0"].is_null());
  CHECK(summary["control_mode"] == "conventional");
}

TEST_CASE("unwritable output directory") {
  const fs::path dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  ScenarioConfig cfg = reference_scenario();
  cfg.t_end = 1e-3;
  CHECK_THROWS_AS(write_outputs(run(cfg), cfg, dir / "file" / "out"), IoError);
}
