#pragma once

#include "flocksim/core.hpp"
#include "flocksim/potentials.hpp"
#include "flocksim/topology.hpp"

#include <utility>
#include <vector>

namespace flocksim {

/// Read-only snapshot handed to every control law.
struct SwarmView {
  const AgentMatrix& positions;
  const AgentMatrix& velocities;
  const ProximityGraph& graph;

  int dim() const { return static_cast<int>(positions.rows()); }
  Vec relative_position(int i, int j) const { return positions.col(i) - positions.col(j); }
  Vec relative_velocity(int i, int j) const { return velocities.col(i) - velocities.col(j); }
};

/// m x 3 regressor of the malicious dynamics: v'_{i_f} = -C k with k = (k_v, k_a, k_r).
using Regressor = Eigen::Matrix<double, Eigen::Dynamic, 3>;

Vec u_normal(int i, const SwarmView& view, const BoundedPotential& pot);

Vec u_malicious(int i_f, const SwarmView& view, const BoundedPotential& pot, const MaliciousParams& params);

Regressor regressor(int i_f, const SwarmView& view, const BoundedPotential& pot);

/// Vertices of a regular s-gon of circumradius delta_bar centred on the
/// malicious agent, first vertex at bearing `orientation`. Vertex k is the
/// desired offset x_j - x_{i_f} of the k-th leader, so the matching desired
/// displacement is x*_{i_f j} = -vertex. Two-dimensional; throws for s < 2.
std::vector<Vec> desired_polygon(int s, double delta_bar, double orientation);

/// Assign polygon vertices to leaders in ascending id order. When
/// `orientation` is empty the bearing of the lowest-id leader is used.
Formation assign_polygon(int malicious, const std::vector<int>& leaders, const AgentMatrix& positions,
                         double delta_bar, std::optional<double> orientation);

/// Gains and barrier constants of the group shape controller.
struct LeaderLaw {
  double kappa_v = 6.0;
  double kappa_x = 2.0;
  double R = 0.0;
  double bar_H = 0.0;
  double iota = 1.0;
  const Formation* formation = nullptr;

  LeaderPotential pair_potential(int a, int b) const;
};

/// Group controller for leader j: velocity consensus and shape terms over
/// N(j) within the group, plus compensation -C k_hat.
Vec u_leader(int j, const SwarmView& view, const LayerPartition& layers, const LeaderLaw& law,
             const Eigen::Vector3d& k_hat, const Regressor& C);

/// Per-pair adaptive gains alpha, indexed by unordered agent pair.
class AdaptiveGains {
 public:
  AdaptiveGains() = default;
  explicit AdaptiveGains(int n, double initial = 0.0);

  int agents() const { return n_; }
  static int pair_count(int n) { return n * (n - 1) / 2; }
  int index(int a, int b) const;

  double at(int a, int b) const { return values_[static_cast<std::size_t>(index(a, b))]; }
  void set(int a, int b, double value) { values_[static_cast<std::size_t>(index(a, b))] = value; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

/// Component-wise signum with a symmetric dead band: zero when |x| <= band.
Vec deadband_sign(const Vec& x, double band);

struct FollowerCommand {
  Vec control;
  std::vector<std::pair<Edge, double>> alpha_rate;
};

FollowerCommand u_follower(int k, const SwarmView& view, const BoundedPotential& pot, const AdaptiveGains& gains,
                           const FollowerParams& params);

}  // namespace flocksim
