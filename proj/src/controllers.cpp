#include "flocksim/controllers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flocksim {

Vec u_normal(int i, const SwarmView& view, const BoundedPotential& pot) {
  Vec u = Vec::Zero(view.dim());
  for (int j : view.graph.neighbors(i)) {
    u -= view.relative_velocity(i, j);
    u -= pot.gradient(view.relative_position(i, j));
  }
  return u;
}

Vec u_malicious(int i_f, const SwarmView& view, const BoundedPotential& pot, const MaliciousParams& params) {
  Vec u = Vec::Zero(view.dim());
  for (int j : view.graph.neighbors(i_f)) {
    u -= params.k_v * view.relative_velocity(i_f, j);
    u -= pot.weighted_gradient(view.relative_position(i_f, j), params.k_a, params.k_r);
  }
  return u;
}

Regressor regressor(int i_f, const SwarmView& view, const BoundedPotential& pot) {
  Regressor C = Regressor::Zero(view.dim(), 3);
  for (int j : view.graph.neighbors(i_f)) {
    const Vec x = view.relative_position(i_f, j);
    C.col(0) += view.relative_velocity(i_f, j);
    C.col(1) += pot.attraction_gradient(x);
    C.col(2) += pot.repulsion_gradient(x);
  }
  return C;
}

std::vector<Vec> desired_polygon(int s, double delta_bar, double orientation) {
  if (s < 2) throw std::invalid_argument("desired_polygon: need at least two vertices");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) {
    const double theta = orientation + 2.0 * std::numbers::pi * k / s;
    Vec v(2);
    v << delta_bar * std::cos(theta), delta_bar * std::sin(theta);
    out.push_back(std::move(v));
  }
  return out;
}

Formation assign_polygon(int malicious, const std::vector<int>& leaders, const AgentMatrix& positions,
                         double delta_bar, std::optional<double> orientation) {
  Formation f;
  f.malicious = malicious;
  if (leaders.empty()) return f;
  if (positions.rows() != 2) throw std::invalid_argument("assign_polygon: polygon generation is two-dimensional");

  const Vec first = positions.col(leaders.front()) - positions.col(malicious);
  const double theta = orientation.value_or(std::atan2(first(1), first(0)));
  if (leaders.size() == 1) {
    // A lone neighbor cannot balance the malicious agent; keep its bearing.
    Vec v(2);
    v << delta_bar * std::cos(theta), delta_bar * std::sin(theta);
    f.displacement[leaders.front()] = -v;
    return f;
  }
  const auto vertices = desired_polygon(static_cast<int>(leaders.size()), delta_bar, theta);
  for (std::size_t k = 0; k < leaders.size(); ++k) f.displacement[leaders[k]] = -vertices[k];
  return f;
}

LeaderPotential LeaderLaw::pair_potential(int a, int b) const {
  if (formation == nullptr) throw std::logic_error("LeaderLaw has no formation");
  return LeaderPotential(R, bar_H, iota, formation->desired(a, b));
}

Vec u_leader(int j, const SwarmView& view, const LayerPartition& layers, const LeaderLaw& law,
             const Eigen::Vector3d& k_hat, const Regressor& C) {
  Vec u = -C * k_hat;
  for (int p : view.graph.neighbors(j)) {
    if (!layers.in_group(p)) continue;
    u -= law.kappa_v * view.relative_velocity(j, p);
    u -= law.kappa_x * law.pair_potential(j, p).gradient(view.relative_position(j, p));
  }
  return u;
}

AdaptiveGains::AdaptiveGains(int n, double initial)
    : n_(n), values_(static_cast<std::size_t>(pair_count(n)), initial) {}

int AdaptiveGains::index(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_) throw std::out_of_range("AdaptiveGains: bad pair");
  if (a > b) std::swap(a, b);
  return a * (2 * n_ - a - 1) / 2 + (b - a - 1);
}

Vec deadband_sign(const Vec& x, double band) {
  Vec out(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    out(c) = x(c) > band ? 1.0 : (x(c) < -band ? -1.0 : 0.0);
  }
  return out;
}

FollowerCommand u_follower(int k, const SwarmView& view, const BoundedPotential& pot, const AdaptiveGains& gains,
                           const FollowerParams& params) {
  FollowerCommand cmd;
  cmd.control = Vec::Zero(view.dim());
  for (int p : view.graph.neighbors(k)) {
    const Vec dv = view.relative_velocity(k, p);
    cmd.control -= gains.at(k, p) * deadband_sign(dv, params.sgn_deadband);
    cmd.control -= pot.gradient(view.relative_position(k, p));
    const Edge e = make_edge(k, p);
    cmd.alpha_rate.emplace_back(e, params.gamma_for(e) * dv.lpNorm<1>());
  }
  return cmd;
}

}  // namespace flocksim
