#pragma once

#include "flocksim/core.hpp"
#include "flocksim/topology.hpp"

namespace flocksim {

struct PairPotential {
  double attraction = 0.0;
  double repulsion = 0.0;
  double total = 0.0;
};

/// Bounded pair potential V = V_a + V_r on [0, R] with ceiling E at both ends
///   V_a(d) = d^2 / (R^2 - d^2 + R^2/E)
///   V_r(d) = (R^2 - d^2) / (d^2 + R^2/E)
/// minimised at d = R / sqrt(2).
class BoundedPotential {
 public:
  BoundedPotential(double R, double E);

  double range() const { return R_; }
  double ceiling() const { return E_; }
  double optimal_distance() const;
  double minimum_value() const { return 2.0 * E_ / (E_ + 2.0); }

  /// Throws std::out_of_range unless 0 <= d <= R.
  PairPotential value(double d) const;
  /// d/dd of each part. Throws std::out_of_range unless 0 < d < R.
  PairPotential derivative(double d) const;

  /// Gradients with respect to x_i of V(|x_ij|), evaluated at x_ij.
  /// Throws std::out_of_range unless 0 < |x_ij| < R.
  Vec gradient(const Vec& x_ij) const;
  Vec attraction_gradient(const Vec& x_ij) const;
  Vec repulsion_gradient(const Vec& x_ij) const;

  /// Gradient of k_a V_a + k_r V_r.
  Vec weighted_gradient(const Vec& x_ij, double k_a, double k_r) const;

 private:
  void check_open(double d) const;

  double R_;
  double E_;
  double R2_;
  double c_;  // R^2 / E
};

/// Unregularised potential used in the choice of E:
/// (R^2 - d^2)/d^2 + d^2/(R^2 - d^2), 0 < d < R.
double unbounded_pair_potential(double d, double R);

/// Shape potential between two group members with desired displacement x*:
///   |x - x*|^2 / (R - |x| + (R - delta)^2/(H + iota)) + |x - x*|^2 / (|x| + delta^2/(H + iota))
/// with delta = |x*|.
class LeaderPotential {
 public:
  LeaderPotential(double R, double bar_H, double iota, Vec desired);

  const Vec& desired() const { return desired_; }

  /// Throws std::out_of_range unless 0 <= |x| <= R.
  double value(const Vec& x) const;
  /// Gradient with respect to x. Throws std::out_of_range unless 0 < |x| < R.
  Vec gradient(const Vec& x) const;

 private:
  double R_;
  Vec desired_;
  double c_far_;
  double c_near_;
};

/// Unregularised shape-potential bound |x - x*|^2/(R - |x|) + |x - x*|^2/|x|
/// used to size H. Throws std::out_of_range unless 0 < |x| < R.
double leader_potential_bound(const Vec& x, const Vec& desired, double R);

/// Lower bound for the potential ceiling E: initial kinetic energy plus
/// N(N-1)/2 times the largest unregularised pair potential over initially
/// interacting pairs. Throws std::invalid_argument on coincident agents.
double compute_bar_Q(const std::vector<AgentState>& initial, double R);

/// Barrier level for the shape potential, from initial group state, the
/// initial graph, estimator gains and the parameter bounds.
double compute_bar_H(const AgentMatrix& positions, const AgentMatrix& velocities, const ProximityGraph& g0,
                     const Formation& formation, double kappa_x, double R, const EstimatorGains& gains,
                     const MaliciousParams& bounds);

}  // namespace flocksim
