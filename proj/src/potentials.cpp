#include "flocksim/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flocksim {

BoundedPotential::BoundedPotential(double R, double E) : R_(R), E_(E), R2_(R * R), c_(R * R / E) {
  if (!(R > 0.0) || !(E > 0.0)) throw std::invalid_argument("BoundedPotential: R and E must be positive");
}

double BoundedPotential::optimal_distance() const { return R_ / std::sqrt(2.0); }

PairPotential BoundedPotential::value(double d) const {
  if (!(d >= 0.0 && d <= R_)) throw std::out_of_range("pair distance " + std::to_string(d) + " outside [0, R]");
  const double d2 = d * d;
  PairPotential p;
  p.attraction = d2 / (R2_ - d2 + c_);
  p.repulsion = (R2_ - d2) / (d2 + c_);
  p.total = p.attraction + p.repulsion;
  return p;
}

void BoundedPotential::check_open(double d) const {
  if (!(d > 0.0 && d < R_)) throw std::out_of_range("pair distance " + std::to_string(d) + " outside (0, R)");
}

PairPotential BoundedPotential::derivative(double d) const {
  check_open(d);
  const double d2 = d * d;
  const double far = R2_ - d2 + c_;
  const double near = d2 + c_;
  PairPotential p;
  p.attraction = 2.0 * d * (R2_ + c_) / (far * far);
  p.repulsion = -2.0 * d * (R2_ + c_) / (near * near);
  p.total = p.attraction + p.repulsion;
  return p;
}

Vec BoundedPotential::gradient(const Vec& x_ij) const { return weighted_gradient(x_ij, 1.0, 1.0); }

Vec BoundedPotential::attraction_gradient(const Vec& x_ij) const { return weighted_gradient(x_ij, 1.0, 0.0); }

Vec BoundedPotential::repulsion_gradient(const Vec& x_ij) const { return weighted_gradient(x_ij, 0.0, 1.0); }

Vec BoundedPotential::weighted_gradient(const Vec& x_ij, double k_a, double k_r) const {
  const double d = x_ij.norm();
  check_open(d);
  // dV/dd * x/d with the common factor 2d cancelled against 1/d.
  const double d2 = d * d;
  const double far = R2_ - d2 + c_;
  const double near = d2 + c_;
  const double scale = 2.0 * (R2_ + c_) * (k_a / (far * far) - k_r / (near * near));
  return scale * x_ij;
}

double unbounded_pair_potential(double d, double R) {
  if (!(d > 0.0 && d < R)) throw std::out_of_range("pair distance " + std::to_string(d) + " outside (0, R)");
  const double d2 = d * d;
  const double R2 = R * R;
  return (R2 - d2) / d2 + d2 / (R2 - d2);
}

LeaderPotential::LeaderPotential(double R, double bar_H, double iota, Vec desired) : R_(R), desired_(std::move(desired)) {
  const double delta = desired_.norm();
  if (!(delta > 0.0 && delta < R)) throw std::invalid_argument("LeaderPotential: need 0 < |x*| < R");
  if (!(bar_H + iota > 0.0)) throw std::invalid_argument("LeaderPotential: bar_H + iota must be positive");
  c_far_ = (R - delta) * (R - delta) / (bar_H + iota);
  c_near_ = delta * delta / (bar_H + iota);
}

double LeaderPotential::value(const Vec& x) const {
  const double r = x.norm();
  if (!(r >= 0.0 && r <= R_)) throw std::out_of_range("group distance " + std::to_string(r) + " outside [0, R]");
  const double q = (x - desired_).squaredNorm();
  return q / (R_ - r + c_far_) + q / (r + c_near_);
}

Vec LeaderPotential::gradient(const Vec& x) const {
  const double r = x.norm();
  if (!(r > 0.0 && r < R_)) throw std::out_of_range("group distance " + std::to_string(r) + " outside (0, R)");
  const Vec e = x - desired_;
  const double q = e.squaredNorm();
  const double A = R_ - r + c_far_;
  const double B = r + c_near_;
  return (2.0 / A + 2.0 / B) * e + (q / r) * (1.0 / (A * A) - 1.0 / (B * B)) * x;
}

double leader_potential_bound(const Vec& x, const Vec& desired, double R) {
  const double r = x.norm();
  if (!(r > 0.0 && r < R)) throw std::out_of_range("group distance " + std::to_string(r) + " outside (0, R)");
  const double q = (x - desired).squaredNorm();
  return q / (R - r) + q / r;
}

double compute_bar_Q(const std::vector<AgentState>& initial, double R) {
  double kinetic = 0.0;
  for (const auto& a : initial) kinetic += 0.5 * a.velocity.squaredNorm();
  double worst = 0.0;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    for (std::size_t j = i + 1; j < initial.size(); ++j) {
      const double d = (initial[i].position - initial[j].position).norm();
      if (d == 0.0) {
        throw std::invalid_argument("agents " + std::to_string(initial[i].id) + " and " +
                                    std::to_string(initial[j].id) + " coincide");
      }
      if (d < R) worst = std::max(worst, unbounded_pair_potential(d, R));
    }
  }
  const double n = static_cast<double>(initial.size());
  return kinetic + 0.5 * n * (n - 1.0) * worst;
}

double compute_bar_H(const AgentMatrix& positions, const AgentMatrix& velocities, const ProximityGraph& g0,
                     const Formation& formation, double kappa_x, double R, const EstimatorGains& gains,
                     const MaliciousParams& bounds) {
  const int i_f = formation.malicious;
  const auto& leaders = g0.neighbors(i_f);
  double total = 0.0;
  for (int j : leaders) {
    const Vec x_jf = positions.col(j) - positions.col(i_f);
    total += kappa_x * leader_potential_bound(x_jf, formation.desired(j, i_f), R);
    for (int i : leaders) {
      if (i == j || !g0.has_edge(i, j)) continue;
      const Vec x_ji = positions.col(j) - positions.col(i);
      total += 0.5 * kappa_x * leader_potential_bound(x_ji, formation.desired(j, i), R);
    }
    total += 0.5 * (velocities.col(j) - velocities.col(i_f)).squaredNorm();
  }
  const double lambda_max_inv = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(gains.Gamma).eigenvalues().minCoeff();
  const Eigen::Vector3d spread = bounds.bounds() + gains.k_hat0.cwiseAbs();
  total += 0.5 * lambda_max_inv * spread.squaredNorm();
  return total;
}

}  // namespace flocksim
