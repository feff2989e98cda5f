#include "flocksim/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace flocksim {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

namespace {

constexpr double kPi = std::numbers::pi;

Vec polar(double radius, double angle) {
  Vec v(2);
  v << radius * std::cos(angle), radius * std::sin(angle);
  return v;
}

Vec heading_velocity(std::mt19937_64& rng) {
  const double speed = uniform(rng, 27.0, 35.0);
  const double heading = uniform(rng, kPi / 6.0, kPi / 4.0);
  return polar(speed, heading);
}

ScenarioConfig reference_base() {
  ScenarioConfig cfg;
  cfg.N = 13;
  cfg.m = 2;
  cfg.R = 18.0 * std::sqrt(2.0);
  cfg.E = 2.0e4;
  cfg.malicious_id = 6;
  cfg.malicious = {0.8, 0.0, 450000.0, 10.0, 10.0, 1.0e6};
  cfg.leader.kappa_v = 6.0;
  cfg.leader.kappa_x = 2.0;
  cfg.leader.delta_bar = 12.0;
  cfg.leader.iota = 1.0;
  cfg.follower.gamma = 1.0;
  cfg.follower.alpha0 = 1.0;
  cfg.estimator.Gamma = 0.1 * Eigen::Matrix3d::Identity();
  cfg.dt = 1e-3;
  cfg.t_end = 20.0;
  cfg.monitor.record_every = 100;
  return cfg;
}

// Leader id -> two followers chained outward along the leader's bearing.
constexpr int kChains[4][3] = {{2, 1, 0}, {5, 4, 3}, {7, 8, 9}, {10, 11, 12}};

void place_chains(ScenarioConfig& cfg, const std::map<int, Vec>& leaders, double link,
                  std::mt19937_64* jitter = nullptr) {
  std::vector<Vec> pos(static_cast<std::size_t>(cfg.N), Vec::Zero(2));
  for (const auto& chain : kChains) {
    const Vec& lead = leaders.at(chain[0]);
    const Vec dir = lead.normalized();
    pos[static_cast<std::size_t>(chain[0])] = lead;
    for (int k = 1; k < 3; ++k) {
      Vec p = lead + k * link * dir;
      if (jitter) {
        p(0) += uniform(*jitter, -0.5, 0.5);
        p(1) += uniform(*jitter, -0.5, 0.5);
      }
      pos[static_cast<std::size_t>(chain[k])] = p;
    }
  }
  for (int i = 0; i < cfg.N; ++i) cfg.initial.push_back({i, pos[static_cast<std::size_t>(i)], Vec::Zero(2)});
}

}  // namespace

ScenarioConfig reference_scenario(std::uint64_t seed) {
  ScenarioConfig cfg = reference_base();
  cfg.seed = seed;
  const double deg = kPi / 180.0;
  // Point-symmetric leader layout, so agent 6 starts with zero net force.
  std::map<int, Vec> leaders;
  leaders[2] = polar(11.6, 40.0 * deg);
  leaders[5] = polar(10.8, 128.0 * deg);
  leaders[7] = -leaders[2];
  leaders[10] = -leaders[5];
  place_chains(cfg, leaders, 19.0);

  std::mt19937_64 rng(seed);
  for (auto& a : cfg.initial) a.velocity = heading_velocity(rng);
  return cfg;
}

ScenarioConfig randomized_scenario(std::uint64_t seed) {
  ScenarioConfig cfg = reference_base();
  cfg.seed = seed;
  std::mt19937_64 rng(seed);
  const double deg = kPi / 180.0;
  const double turn = uniform(rng, 0.0, 2.0 * kPi);
  std::map<int, Vec> leaders;
  // Near-square leader layout: large angular errors swing the chains into the malicious agent's range.
  const double first = turn + uniform(rng, 30.0, 50.0) * deg;
  leaders[2] = polar(uniform(rng, 11.0, 12.5), first);
  leaders[5] = polar(uniform(rng, 11.0, 12.5), first + uniform(rng, 85.0, 95.0) * deg);
  leaders[7] = -leaders[2];
  leaders[10] = -leaders[5];
  place_chains(cfg, leaders, uniform(rng, 18.0, 20.0), &rng);

  cfg.malicious.k_v = uniform(rng, 0.2, 1.0);
  cfg.malicious.k_a = uniform(rng, 0.0, 1.0);
  cfg.malicious.k_r = uniform(rng, 1.0, 2.0e5);
  // Shared flock velocity plus a per-agent perturbation.
  const Vec common = heading_velocity(rng);
  for (auto& a : cfg.initial) {
    a.velocity = common;
    a.velocity(0) += uniform(rng, -2.0, 2.0);
    a.velocity(1) += uniform(rng, -2.0, 2.0);
  }
  cfg.t_end = 5.0;
  return cfg;
}

ScenarioConfig baseline_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.N = 7;
  cfg.m = 2;
  cfg.R = 5.0;
  cfg.E = 100.0;
  cfg.malicious_id = 0;
  cfg.malicious = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  cfg.leader.delta_bar = 2.0;
  cfg.mode = ControlMode::Conventional;
  cfg.dt = 1e-3;
  cfg.t_end = 30.0;
  cfg.seed = seed;
  cfg.monitor.record_every = 100;

  std::mt19937_64 rng(seed);
  cfg.initial.push_back({0, Vec::Zero(2), Vec::Zero(2)});
  // Hexagonal wheel at the potential minimum, spacing R / sqrt(2).
  for (int k = 0; k < 6; ++k) cfg.initial.push_back({k + 1, polar(cfg.R / std::sqrt(2.0), k * kPi / 3.0), Vec::Zero(2)});
  for (auto& a : cfg.initial) a.velocity = polar(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 2.0 * kPi));
  return cfg;
}

ScenarioConfig single_neighbor_scenario(std::uint64_t seed) {
  ScenarioConfig cfg = reference_base();
  cfg.N = 4;
  cfg.malicious_id = 0;
  cfg.mode = ControlMode::Conventional;
  cfg.seed = seed;
  cfg.t_end = 5.0;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cfg.N; ++i) {
    const double x = i == 0 ? 0.0 : 11.0 + 19.0 * (i - 1);
    cfg.initial.push_back({i, polar(x, 0.0), heading_velocity(rng)});
  }
  return cfg;
}

}  // namespace flocksim
