#include "flocksim/scenarios.hpp"
#include "flocksim/topology.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace flocksim;
using testing::vec2;

namespace {

ProximityGraph from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
  ProximityGraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

ProximityGraph reference_graph() {
  const ScenarioConfig cfg = reference_scenario();
  return build_graph(stack_positions(cfg.initial), cfg.R);
}

}  // namespace

TEST_CASE("build_graph uses the open interval (0, R)") {
  const AgentMatrix at_R = testing::columns({vec2(0, 0), vec2(5, 0)});
  CHECK(build_graph(at_R, 5.0).edges().empty());
  CHECK(build_graph(at_R, 5.0 + 1e-9).has_edge(0, 1));

  const AgentMatrix same = testing::columns({vec2(1, 1), vec2(1, 1)});
  CHECK(build_graph(same, 5.0).edges().empty());

  const AgentMatrix one = testing::columns({vec2(0, 0)});
  CHECK(build_graph(one, 5.0).edges().empty());
}

TEST_CASE("graph bookkeeping") {
  ProximityGraph g(4);
  g.add_edge(2, 0);
  g.add_edge(0, 1);
  g.add_edge(1, 0);
  CHECK(g.neighbors(0) == std::vector<int>{1, 2});
  CHECK(g.degree(1) == 1);
  CHECK(g.has_edge(0, 2));
  CHECK_FALSE(g.has_edge(2, 3));
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK_THROWS(g.add_edge(1, 1));
}

TEST_CASE("layer partition") {
  SUBCASE("complete graph") {
    const auto g = from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const LayerPartition p = layer_partition(g, 0);
    CHECK(p.leaders == std::vector<int>{1, 2, 3});
    CHECK(p.followers.empty());
    CHECK(p.group == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("star") {
    const auto g = from_edges(5, {{2, 0}, {2, 1}, {2, 3}, {2, 4}});
    const LayerPartition p = layer_partition(g, 2);
    CHECK(p.leaders == std::vector<int>{0, 1, 3, 4});
    CHECK(p.followers.empty());
    CHECK(p.role(2) == LayerPartition::Role::Malicious);
  }
  SUBCASE("reference layout") {
    const LayerPartition p = layer_partition(reference_graph(), 6);
    CHECK(p.leaders == std::vector<int>{2, 5, 7, 10});
    CHECK(p.followers == std::vector<int>{0, 1, 3, 4, 8, 9, 11, 12});
    CHECK(p.is_leader(7));
    CHECK(p.is_follower(12));
    CHECK_FALSE(p.in_group(0));
  }
}

TEST_CASE("connectivity") {
  const ProximityGraph g(3);
  const std::vector<int> single{1};
  CHECK(is_connected(g, single));
  const std::vector<int> pair{0, 2};
  CHECK_FALSE(is_connected(g, pair));
  CHECK_THROWS_AS(is_connected(g, std::vector<int>{}), std::invalid_argument);

  const ProximityGraph ref = reference_graph();
  std::vector<int> without_six;
  for (int i = 0; i < 13; ++i) {
    if (i != 6) without_six.push_back(i);
  }
  CHECK(is_connected(ref, without_six));

  // Path 0-1-2 loses connectivity once its middle vertex is dropped.
  const auto path = from_edges(3, {{0, 1}, {1, 2}});
  CHECK(is_connected(path, std::vector<int>{0, 1, 2}));
  CHECK_FALSE(is_connected(path, std::vector<int>{0, 2}));
}

TEST_CASE("laplacian of an induced subgraph") {
  const auto g = from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const std::vector<int> subset{3, 0, 1};
  const Eigen::MatrixXd L = laplacian(g, subset);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(L.isApprox(expected));
  CHECK(L.rowwise().sum().norm() == 0.0);
}

TEST_CASE("followers reachable from a leader") {
  const LayerPartition p = layer_partition(reference_graph(), 6);
  const ProximityGraph g = reference_graph();
  CHECK(reachable_followers(g, p, 2) == std::vector<int>{0, 1});
  CHECK(reachable_followers(g, p, 10) == std::vector<int>{11, 12});
}

TEST_CASE("leader-follower matrix") {
  SUBCASE("two-follower path") {
    Eigen::MatrixXd L(2, 2);
    L << 1, -1, -1, 1;
    const auto lf = leader_follower_matrix(L, {true, false});
    CHECK(lf.lambda_min == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(lf.pinning.isApprox(lf.pinning * lf.pinning));
    CHECK(lf.matrix.isApprox(lf.matrix.transpose()));
  }
  SUBCASE("single pinned follower") {
    const auto lf = leader_follower_matrix(Eigen::MatrixXd::Zero(1, 1), {true});
    CHECK(lf.lambda_min == doctest::Approx(1.0));
  }
  SUBCASE("from a graph") {
    const ProximityGraph g = reference_graph();
    const LayerPartition p = layer_partition(g, 6);
    const auto lf = leader_follower_matrix(g, p, 5);
    CHECK(lf.followers == std::vector<int>{3, 4});
    CHECK(lf.lambda_min > 0.0);
    CHECK(lf.matrix.isApprox(lf.laplacian + lf.pinning));
  }
  SUBCASE("leader without followers") {
    const auto g = from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    CHECK_THROWS_AS(leader_follower_matrix(g, layer_partition(g, 0), 1), std::invalid_argument);
  }
}

TEST_CASE("leader-follower spectrum on random graphs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int v = 1; v < n; ++v) {
      const int u = static_cast<int>(rng() % static_cast<std::uint64_t>(v));
      A(u, v) = A(v, u) = 1.0;
    }
    Eigen::MatrixXd L = -A;
    L.diagonal() = A.rowwise().sum();
    std::vector<bool> pinned(static_cast<std::size_t>(n), false);
    pinned[rng() % static_cast<std::uint64_t>(n)] = true;
    const double base = leader_follower_matrix(L, pinned).lambda_min;
    CHECK(base > 0.0);

    // Brute-force oracle: minimum Rayleigh quotient over random directions
    // is never below the reported eigenvalue.
    const Eigen::MatrixXd Rj = leader_follower_matrix(L, pinned).matrix;
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd z(n);
      for (int c = 0; c < n; ++c) z(c) = uniform(rng, -1.0, 1.0);
      CHECK(z.dot(Rj * z) / z.squaredNorm() >= base - 1e-12);
    }

    std::vector<bool> more = pinned;
    more[rng() % static_cast<std::uint64_t>(n)] = true;
    CHECK(leader_follower_matrix(L, more).lambda_min >= base - 1e-12);
  }
}

TEST_CASE("rigidity rank") {
  SUBCASE("triangle") {
    const AgentMatrix X = testing::columns({vec2(0, 0), vec2(3, 0), vec2(1, 2)});
    const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}};
    const RigidityReport r = rigidity_rank(X, edges);
    CHECK(r.rank == 3);
    CHECK(r.generic_rank == 3);
    CHECK_FALSE(r.degenerate);
  }
  SUBCASE("collinear agents") {
    const AgentMatrix X = testing::columns({vec2(0, 0), vec2(1, 0), vec2(2, 0), vec2(3, 0)});
    std::vector<Edge> edges;
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) edges.push_back({a, b});
    }
    const RigidityReport r = rigidity_rank(X, edges);
    CHECK(r.rank < 5);
    CHECK(r.degenerate);
  }
  SUBCASE("square around the centre") {
    const AgentMatrix X = testing::columns({vec2(0, 0), vec2(12, 0), vec2(0, 12), vec2(-12, 0), vec2(0, -12)});
    std::vector<Edge> edges;
    for (int a = 0; a < 5; ++a) {
      for (int b = a + 1; b < 5; ++b) edges.push_back({a, b});
    }
    const RigidityReport r = rigidity_rank(X, edges);
    CHECK(r.rank == 7);
    CHECK(r.generic_rank == 7);
    CHECK(r.matrix.rows() == 10);
    CHECK(r.matrix.cols() == 10);
  }
}
