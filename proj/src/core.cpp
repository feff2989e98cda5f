#include "flocksim/core.hpp"

#include "flocksim/controllers.hpp"
#include "flocksim/potentials.hpp"
#include "flocksim/topology.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace flocksim {

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::Hierarchical:
      return "hierarchical";
    case ControlMode::Conventional:
      return "conventional";
  }
  return "hierarchical";
}

ControlMode control_mode_from_string(std::string_view name) {
  if (name == "hierarchical") return ControlMode::Hierarchical;
  if (name == "conventional") return ControlMode::Conventional;
  throw std::invalid_argument("unknown control mode '" + std::string(name) + "'");
}

Vec Formation::desired(int a, int b) const {
  // x*_{a b} = x*_{a i_f} - x*_{b i_f} with x*_{j i_f} = -x*_{i_f j}.
  auto offset = [&](int id) -> Vec {
    if (id == malicious) {
      return Vec::Zero(displacement.begin()->second.size());
    }
    auto it = displacement.find(id);
    if (it == displacement.end()) {
      throw std::invalid_argument("no desired displacement for agent " + std::to_string(id));
    }
    return -it->second;
  };
  if (displacement.empty()) {
    throw std::invalid_argument("formation has no leaders");
  }
  return offset(a) - offset(b);
}

Vec relative_position(const AgentState& a, const AgentState& b) {
  if (a.position.size() != b.position.size()) {
    throw std::invalid_argument("relative_position: dimension mismatch");
  }
  return a.position - b.position;
}

bool ValidationReport::has(std::string_view check) const {
  for (const auto& v : violations) {
    if (v.check == check) return true;
  }
  return false;
}

std::string ValidationReport::describe() const {
  if (violations.empty()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].check << ": " << violations[i].detail;
  }
  return out.str();
}

AgentMatrix stack_positions(const std::vector<AgentState>& agents) {
  const auto m = agents.empty() ? 0 : agents.front().position.size();
  AgentMatrix out(m, static_cast<Eigen::Index>(agents.size()));
  for (const auto& a : agents) out.col(a.id) = a.position;
  return out;
}

AgentMatrix stack_velocities(const std::vector<AgentState>& agents) {
  const auto m = agents.empty() ? 0 : agents.front().velocity.size();
  AgentMatrix out(m, static_cast<Eigen::Index>(agents.size()));
  for (const auto& a : agents) out.col(a.id) = a.velocity;
  return out;
}

namespace {

bool finite(double x) { return std::isfinite(x); }

void check_structure(const ScenarioConfig& cfg, ValidationReport& report) {
  auto fail = [&](std::string detail) { report.violations.push_back({std::string(kStructure), std::move(detail)}); };

  if (cfg.m < 2) fail("dimension m must be >= 2");
  if (cfg.N < 4) fail("N must be >= 4");
  if (static_cast<int>(cfg.initial.size()) != cfg.N) fail("initial state count differs from N");
  if (!(cfg.R > 0.0) || !finite(cfg.R)) fail("R must be positive");
  if (!(cfg.E > 0.0) || !finite(cfg.E)) fail("E must be positive");
  if (cfg.malicious_id < 0 || cfg.malicious_id >= cfg.N) fail("malicious_id out of range");
  if (!(cfg.dt > 0.0) || !(cfg.dt <= cfg.t_end)) fail("need 0 < dt <= t_end");

  std::set<int> ids;
  for (const auto& a : cfg.initial) {
    if (a.id < 0 || a.id >= cfg.N) fail("agent id " + std::to_string(a.id) + " out of range");
    if (!ids.insert(a.id).second) fail("duplicate agent id " + std::to_string(a.id));
    if (a.position.size() != cfg.m || a.velocity.size() != cfg.m) {
      fail("agent " + std::to_string(a.id) + " has wrong dimension");
    } else if (!a.position.allFinite() || !a.velocity.allFinite()) {
      fail("agent " + std::to_string(a.id) + " has non-finite state");
    }
  }

  const auto& lp = cfg.leader;
  if (!(lp.kappa_v >= 1.0) || !(lp.kappa_x >= 1.0)) fail("kappa_v and kappa_x must be >= 1");
  if (!(lp.iota > 0.0)) fail("iota must be positive");
  if (lp.bar_H && !(*lp.bar_H > 0.0)) fail("bar_H must be positive");

  const auto& fp = cfg.follower;
  if (!(fp.gamma > 0.0)) fail("gamma must be positive");
  if (!(fp.alpha0 >= 0.0)) fail("alpha0 must be non-negative");
  if (!(fp.sgn_deadband > 0.0)) fail("sgn_deadband must be positive");
  for (const auto& [e, g] : fp.edge_gamma) {
    if (!(g > 0.0)) fail("edge gamma must be positive");
  }
  for (const auto& [e, a0] : fp.edge_alpha0) {
    if (!(a0 >= 0.0)) fail("edge alpha0 must be non-negative");
  }

  const auto& eg = cfg.estimator;
  if (!(eg.a > 0.0)) fail("filter gain a must be positive");
  if (!eg.Gamma.isApprox(eg.Gamma.transpose(), 1e-12)) {
    fail("Gamma must be symmetric");
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(eg.Gamma);
    if (!(es.eigenvalues().minCoeff() > 0.0)) fail("Gamma must be positive definite");
  }

  const auto& mp = cfg.malicious;
  if (!(mp.bound_v > 0.0 && mp.bound_a > 0.0 && mp.bound_r > 0.0)) fail("parameter bounds must be positive");

  if (cfg.monitor.record_every < 1) fail("record_every must be >= 1");
}

}  // namespace

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  ValidationReport report;
  check_structure(cfg, report);
  if (!report.ok()) return report;

  auto fail = [&](std::string_view check, std::string detail) {
    report.violations.push_back({std::string(check), std::move(detail)});
  };

  const auto& mp = cfg.malicious;
  if (std::abs(mp.k_v) > mp.bound_v || std::abs(mp.k_a) > mp.bound_a || std::abs(mp.k_r) > mp.bound_r) {
    fail(kAssumption1, "malicious gains exceed their bounds");
  }

  const AgentMatrix x0 = stack_positions(cfg.initial);
  const ProximityGraph g0 = build_graph(x0, cfg.R);
  const int i_f = cfg.malicious_id;

  std::vector<int> normal;
  for (int i = 0; i < cfg.N; ++i) {
    if (i != i_f) normal.push_back(i);
  }
  if (!is_connected(g0, normal)) fail(kAssumption2, "graph without the malicious agent is disconnected");

  try {
    const double bar_Q = compute_bar_Q(cfg.initial, cfg.R);
    if (!(cfg.E > bar_Q)) {
      fail(kEnergyCeiling, "E = " + std::to_string(cfg.E) + " does not exceed Q_bar = " + std::to_string(bar_Q));
    }
  } catch (const std::exception& ex) {
    fail(kEnergyCeiling, ex.what());
  }

  if (cfg.mode == ControlMode::Conventional) return report;

  const auto& leaders = g0.neighbors(i_f);
  if (leaders.size() < 2) {
    fail(kAssumption3, "malicious agent has " + std::to_string(leaders.size()) + " neighbor(s), need >= 2");
  }
  bool clique = true;
  for (std::size_t a = 0; a < leaders.size(); ++a) {
    for (std::size_t b = a + 1; b < leaders.size(); ++b) {
      clique = clique && g0.has_edge(leaders[a], leaders[b]);
    }
  }
  if (!clique) fail(kAssumption4, "neighbors of the malicious agent are not pairwise neighbors");

  const double delta_bar = cfg.leader.delta_bar;
  if (!(delta_bar > 0.0 && delta_bar < cfg.R / 2.0)) {
    fail(kDeltaBar, "delta_bar = " + std::to_string(delta_bar) + " must lie in (0, R/2)");
  }

  const auto& desired = cfg.leader.desired_displacements;
  if (!desired.empty()) {
    std::vector<int> keys;
    Vec sum = Vec::Zero(cfg.m);
    bool sizes_ok = true;
    for (const auto& [id, x] : desired) {
      keys.push_back(id);
      if (x.size() != cfg.m) {
        sizes_ok = false;
        continue;
      }
      sum += x;
      if (std::abs(x.norm() - delta_bar) > 1e-9 * std::max(1.0, delta_bar)) {
        fail(kDesiredDisplacements, "|x*| differs from delta_bar for agent " + std::to_string(id));
      }
    }
    if (!sizes_ok) fail(kDesiredDisplacements, "desired displacement has wrong dimension");
    if (keys != leaders) fail(kDesiredDisplacements, "desired displacements must cover exactly the initial neighbors");
    if (sizes_ok && sum.norm() > 1e-9 * std::max(1.0, delta_bar) * static_cast<double>(desired.size())) {
      fail(kDesiredDisplacements, "desired displacements do not sum to zero");
    }
  } else if (cfg.m != 2 && leaders.size() >= 2) {
    fail(kDesiredDisplacements, "polygon generation needs m = 2; supply desired displacements");
  }
  return report;
}

}  // namespace flocksim
