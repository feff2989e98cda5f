#include "flocksim/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace flocksim {

void ProximityGraph::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("self-loop");
  auto insert = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  insert(adjacency_.at(static_cast<std::size_t>(a)), b);
  insert(adjacency_.at(static_cast<std::size_t>(b)), a);
}

bool ProximityGraph::has_edge(int a, int b) const {
  const auto& v = neighbors(a);
  return std::binary_search(v.begin(), v.end(), b);
}

std::vector<Edge> ProximityGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i) {
    for (int j : neighbors(i)) {
      if (i < j) out.push_back({i, j});
    }
  }
  return out;
}

ProximityGraph build_graph(const AgentMatrix& positions, double R) {
  const int n = static_cast<int>(positions.cols());
  ProximityGraph g(n);
  const double R2 = R * R;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d2 = (positions.col(i) - positions.col(j)).squaredNorm();
      if (d2 > 0.0 && d2 < R2) g.add_edge(i, j);
    }
  }
  return g;
}

LayerPartition layer_partition(const ProximityGraph& g, int malicious) {
  if (malicious < 0 || malicious >= g.size()) throw std::invalid_argument("malicious id out of range");
  LayerPartition p;
  p.malicious = malicious;
  p.roles.assign(static_cast<std::size_t>(g.size()), LayerPartition::Role::Follower);
  p.roles[static_cast<std::size_t>(malicious)] = LayerPartition::Role::Malicious;
  p.leaders = g.neighbors(malicious);
  for (int j : p.leaders) p.roles[static_cast<std::size_t>(j)] = LayerPartition::Role::Leader;
  for (int i = 0; i < g.size(); ++i) {
    if (p.roles[static_cast<std::size_t>(i)] == LayerPartition::Role::Follower) p.followers.push_back(i);
  }
  p.group.push_back(malicious);
  p.group.insert(p.group.end(), p.leaders.begin(), p.leaders.end());
  return p;
}

bool is_connected(const ProximityGraph& g, std::span<const int> subset) {
  if (subset.empty()) throw std::invalid_argument("is_connected: empty subset");
  std::vector<char> member(static_cast<std::size_t>(g.size()), 0);
  for (int v : subset) member.at(static_cast<std::size_t>(v)) = 1;

  std::vector<char> seen(member.size(), 0);
  std::deque<int> queue{subset.front()};
  seen[static_cast<std::size_t>(subset.front())] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : g.neighbors(v)) {
      const auto w_idx = static_cast<std::size_t>(w);
      if (member[w_idx] && !seen[w_idx]) {
        seen[w_idx] = 1;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  std::size_t distinct = 0;
  for (char c : member) distinct += c ? 1 : 0;
  return reached == distinct;
}

Eigen::MatrixXd laplacian(const ProximityGraph& g, std::span<const int> subset) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      if (g.has_edge(subset[static_cast<std::size_t>(a)], subset[static_cast<std::size_t>(b)])) {
        L(a, b) = L(b, a) = -1.0;
        L(a, a) += 1.0;
        L(b, b) += 1.0;
      }
    }
  }
  return L;
}

std::vector<int> reachable_followers(const ProximityGraph& g, const LayerPartition& layers, int leader) {
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::deque<int> queue;
  for (int k : g.neighbors(leader)) {
    if (layers.is_follower(k)) {
      seen[static_cast<std::size_t>(k)] = 1;
      queue.push_back(k);
    }
  }
  std::vector<int> out;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    out.push_back(v);
    for (int w : g.neighbors(v)) {
      if (layers.is_follower(w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LeaderFollowerMatrix leader_follower_matrix(const Eigen::MatrixXd& follower_laplacian,
                                            const std::vector<bool>& pinned) {
  const auto n = follower_laplacian.rows();
  if (n == 0) throw std::invalid_argument("leader_follower_matrix: no followers");
  if (follower_laplacian.cols() != n || static_cast<Eigen::Index>(pinned.size()) != n) {
    throw std::invalid_argument("leader_follower_matrix: size mismatch");
  }
  LeaderFollowerMatrix out;
  out.laplacian = follower_laplacian;
  out.pinning = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.pinning(i, i) = pinned[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  out.matrix = out.laplacian + out.pinning;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix, Eigen::EigenvaluesOnly);
  out.lambda_min = es.eigenvalues().minCoeff();
  return out;
}

LeaderFollowerMatrix leader_follower_matrix(const ProximityGraph& g, const LayerPartition& layers, int leader) {
  const std::vector<int> followers = reachable_followers(g, layers, leader);
  if (followers.empty()) {
    throw std::invalid_argument("leader " + std::to_string(leader) + " has no followers");
  }
  std::vector<bool> pinned;
  pinned.reserve(followers.size());
  for (int k : followers) pinned.push_back(g.has_edge(leader, k));
  LeaderFollowerMatrix out = leader_follower_matrix(laplacian(g, followers), pinned);
  out.leader = leader;
  out.followers = followers;
  return out;
}

RigidityReport rigidity_rank(const AgentMatrix& positions, std::span<const Edge> edges) {
  const auto m = positions.rows();
  const auto d = positions.cols();
  RigidityReport out;
  out.generic_rank = static_cast<int>(m * d - m * (m + 1) / 2);
  out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges.size()), m * d);
  for (std::size_t r = 0; r < edges.size(); ++r) {
    const auto [i, j] = edges[r];
    const Vec x_ij = positions.col(i) - positions.col(j);
    const auto row = static_cast<Eigen::Index>(r);
    out.matrix.block(row, i * m, 1, m) = x_ij.transpose();
    out.matrix.block(row, j * m, 1, m) = -x_ij.transpose();
  }
  if (out.matrix.size() == 0) {
    out.degenerate = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.matrix);
  out.singular_values = svd.singularValues();
  const double cutoff = 1e-8 * out.singular_values(0);
  out.rank = static_cast<int>((out.singular_values.array() > cutoff).count());
  out.degenerate = out.rank < out.generic_rank;
  return out;
}

}  // namespace flocksim
