#pragma once

#include "flocksim/core.hpp"

#include <span>
#include <vector>

namespace flocksim {

/// Undirected proximity graph: (i, j) is an edge iff 0 < |x_ij| < R.
class ProximityGraph {
 public:
  explicit ProximityGraph(int n = 0) : adjacency_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(adjacency_.size()); }

  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;

  /// Sorted neighbor ids of vertex i.
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  std::vector<Edge> edges() const;

  bool operator==(const ProximityGraph&) const = default;

 private:
  std::vector<std::vector<int>> adjacency_;
};

ProximityGraph build_graph(const AgentMatrix& positions, double R);

/// Layer 1 is the malicious agent, Layer 2 its neighbors (leaders),
/// Layer 3 everyone else (followers).
struct LayerPartition {
  enum class Role { Malicious, Leader, Follower };

  int malicious = 0;
  std::vector<int> leaders;
  std::vector<int> followers;
  std::vector<int> group;  // malicious agent followed by the leaders
  std::vector<Role> roles;

  Role role(int id) const { return roles.at(static_cast<std::size_t>(id)); }
  bool is_leader(int id) const { return role(id) == Role::Leader; }
  bool is_follower(int id) const { return role(id) == Role::Follower; }
  bool in_group(int id) const { return role(id) != Role::Follower; }
};

LayerPartition layer_partition(const ProximityGraph& g, int malicious);

/// Breadth-first connectivity of the subgraph induced by `subset`.
/// Throws std::invalid_argument on an empty subset.
bool is_connected(const ProximityGraph& g, std::span<const int> subset);

/// Graph Laplacian of the subgraph induced by `subset`, rows in subset order.
Eigen::MatrixXd laplacian(const ProximityGraph& g, std::span<const int> subset);

/// Followers reachable from `leader` through paths that stay inside Layer 3.
std::vector<int> reachable_followers(const ProximityGraph& g, const LayerPartition& layers, int leader);

struct LeaderFollowerMatrix {
  int leader = 0;
  std::vector<int> followers;   // F(j), ascending
  Eigen::MatrixXd laplacian;    // L_j over F(j)
  Eigen::MatrixXd pinning;      // Lambda_j, 0/1 diagonal
  Eigen::MatrixXd matrix;       // R_j = L_j + Lambda_j
  double lambda_min = 0.0;
};

/// R_j for leader j. Throws std::invalid_argument when F(j) is empty.
LeaderFollowerMatrix leader_follower_matrix(const ProximityGraph& g, const LayerPartition& layers, int leader);

/// Same construction from an explicit follower Laplacian and pinning pattern.
LeaderFollowerMatrix leader_follower_matrix(const Eigen::MatrixXd& follower_laplacian,
                                            const std::vector<bool>& pinned);

struct RigidityReport {
  int rank = 0;
  int generic_rank = 0;  // m*d - m(m+1)/2
  bool degenerate = false;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singular_values;
};

/// Rank of the distance rigidity matrix of the framework (positions, edges).
/// Edge indices refer to columns of `positions`. Singular values below
/// 1e-8 times the largest count as zero.
RigidityReport rigidity_rank(const AgentMatrix& positions, std::span<const Edge> edges);

}  // namespace flocksim
