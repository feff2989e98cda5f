#include "flocksim/core.hpp"
#include "flocksim/scenarios.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace flocksim;
using testing::vec2;

TEST_CASE("relative_position") {
  const AgentState a{0, vec2(1, 0), vec2(0, 0)};
  const AgentState b{1, vec2(1, 0), vec2(0, 0)};
  CHECK(relative_position(a, b).norm() == 0.0);

  const AgentState c{2, vec2(3, 4), vec2(0, 0)};
  const AgentState o{3, vec2(0, 0), vec2(0, 0)};
  CHECK(relative_position(c, o).isApprox(vec2(3, 4)));
  CHECK(relative_position(c, o).norm() == doctest::Approx(5.0));

  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const AgentState p{0, vec2(uniform(rng, -9, 9), uniform(rng, -9, 9)), vec2(0, 0)};
    const AgentState q{1, vec2(uniform(rng, -9, 9), uniform(rng, -9, 9)), vec2(0, 0)};
    CHECK(relative_position(p, q) == -relative_position(q, p));
  }
}

TEST_CASE("control mode names round-trip") {
  CHECK(to_string(ControlMode::Hierarchical) == "hierarchical");
  CHECK(control_mode_from_string("conventional") == ControlMode::Conventional);
  CHECK_THROWS(control_mode_from_string("adaptive"));
}

TEST_CASE("make_edge orders its endpoints") {
  CHECK(make_edge(5, 2) == Edge{2, 5});
  CHECK(make_edge(2, 5) == Edge{2, 5});
}

TEST_CASE("Formation::desired composes offsets") {
  Formation f;
  f.malicious = 0;
  f.displacement[1] = vec2(-2, 0);
  f.displacement[2] = vec2(0, -2);
  CHECK(f.desired(0, 1).isApprox(vec2(-2, 0)));
  CHECK(f.desired(1, 0).isApprox(vec2(2, 0)));
  CHECK(f.desired(1, 2).isApprox(vec2(2, -2)));
  CHECK(f.contains(0));
  CHECK_FALSE(f.contains(3));
}

TEST_CASE("stacking orders columns by id") {
  const std::vector<AgentState> agents{{1, vec2(1, 1), vec2(2, 2)}, {0, vec2(0, 0), vec2(3, 3)}};
  const AgentMatrix X = stack_positions(agents);
  CHECK(X.col(0).isApprox(vec2(0, 0)));
  CHECK(X.col(1).isApprox(vec2(1, 1)));
  CHECK(stack_velocities(agents).col(0).isApprox(vec2(3, 3)));
}

TEST_CASE("validation of the reference scenario") {
  CHECK(validate_scenario(reference_scenario()).ok());
}

TEST_CASE("validation flags broken assumptions") {
  SUBCASE("gain above its bound") {
    ScenarioConfig cfg = reference_scenario();
    cfg.malicious.k_r = 2.0e6;
    const ValidationReport r = validate_scenario(cfg);
    CHECK(r.has(kAssumption1));
  }
  SUBCASE("single neighbor under the hierarchical law") {
    ScenarioConfig cfg = single_neighbor_scenario();
    CHECK(validate_scenario(cfg).ok());
    cfg.mode = ControlMode::Hierarchical;
    CHECK(validate_scenario(cfg).has(kAssumption3));
  }
  SUBCASE("delta_bar beyond R/2") {
    ScenarioConfig cfg = reference_scenario();
    cfg.leader.delta_bar = 14.0;
    CHECK(validate_scenario(cfg).has(kDeltaBar));
  }
  SUBCASE("normal agents disconnected") {
    ScenarioConfig cfg = reference_scenario();
    cfg.initial[0].position += vec2(500, 0);
    CHECK(validate_scenario(cfg).has(kAssumption2));
  }
  SUBCASE("leaders not pairwise adjacent") {
    ScenarioConfig cfg;
    cfg.N = 4;
    cfg.R = 10.0;
    cfg.E = 1.0e4;
    cfg.leader.delta_bar = 4.0;
    // Agents 1 and 2 are 12 apart; agent 3 links them.
    cfg.initial = {{0, vec2(0, 0), vec2(0, 0)},
                   {1, vec2(6, 0), vec2(0, 0)},
                   {2, vec2(-6, 0), vec2(0, 0)},
                   {3, vec2(0, 7), vec2(0, 0)}};
    const ValidationReport r = validate_scenario(cfg);
    CHECK(r.has(kAssumption4));
    CHECK_FALSE(r.has(kAssumption2));
    CHECK_FALSE(r.has(kStructure));
  }
  SUBCASE("energy ceiling too low") {
    ScenarioConfig cfg = reference_scenario();
    cfg.E = 10.0;
    CHECK(validate_scenario(cfg).has(kEnergyCeiling));
  }
  SUBCASE("desired displacements that do not close") {
    ScenarioConfig cfg = reference_scenario();
    for (int id : {2, 5, 7, 10}) cfg.leader.desired_displacements[id] = vec2(12, 0);
    CHECK(validate_scenario(cfg).has(kDesiredDisplacements));
  }
  SUBCASE("structural errors stop further checks") {
    ScenarioConfig cfg = reference_scenario();
    cfg.initial[3].id = 4;
    const ValidationReport r = validate_scenario(cfg);
    CHECK(r.has(kStructure));
    CHECK_FALSE(r.has(kAssumption2));
    CHECK(r.describe().find("duplicate") != std::string::npos);
  }
}

TEST_CASE("uniform draws are reproducible") {
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  for (int n = 0; n < 100; ++n) {
    const double x = uniform(a, -1.0, 2.0);
    CHECK(x == uniform(b, -1.0, 2.0));
    CHECK(x >= -1.0);
    CHECK(x < 2.0);
  }
}
