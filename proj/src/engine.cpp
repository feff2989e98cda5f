#include "flocksim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace flocksim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::EdgeAdded:
      return "edge_added";
    case EventKind::EdgeLost:
      return "edge_lost";
    case EventKind::Collision:
      return "collision";
    case EventKind::Escape:
      return "escape";
  }
  return "edge_added";
}

ContainmentReport containment_check(const SwarmView& view, const Vec& u_malicious, const LayerPartition& layers,
                                    double delta_bar, double tol_u, double tol_d) {
  ContainmentReport r;
  r.acceleration_residual = u_malicious.norm();
  for (int j : layers.leaders) {
    const double err = std::abs(view.relative_position(layers.malicious, j).norm() - delta_bar);
    r.distance_errors.emplace_back(j, err);
    r.max_distance_error = std::max(r.max_distance_error, err);
  }
  r.acceleration_ok = r.acceleration_residual <= tol_u;
  r.distances_ok = !layers.leaders.empty() && r.max_distance_error <= tol_d;
  r.contained = r.acceleration_ok && r.distances_ok;
  return r;
}

double energy_H(const SwarmView& view, const LayerPartition& layers, const LeaderLaw& law,
                const Eigen::Vector3d& k_true, const Eigen::Vector3d& k_hat, const Eigen::Matrix3d& Gamma) {
  const int i_f = layers.malicious;
  std::vector<int> active;
  for (int j : layers.leaders) {
    if (view.graph.has_edge(j, i_f)) active.push_back(j);
  }
  double total = 0.0;
  for (int j : active) {
    total += law.kappa_x * law.pair_potential(j, i_f).value(view.relative_position(j, i_f));
    for (int i : active) {
      if (i == j || !view.graph.has_edge(i, j)) continue;
      total += 0.5 * law.kappa_x * law.pair_potential(j, i).value(view.relative_position(j, i));
    }
    total += 0.5 * view.relative_velocity(j, i_f).squaredNorm();
  }
  const Eigen::Vector3d k_tilde = k_true - k_hat;
  total += 0.5 * k_tilde.dot(Gamma.ldlt().solve(k_tilde));
  return total;
}

namespace {

// Leaders adjacent to each follower's connected component in V_f.
std::vector<std::vector<int>> follower_leader_sets(const ProximityGraph& g, const LayerPartition& layers) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g.size()));
  std::vector<int> component(static_cast<std::size_t>(g.size()), -1);
  int next = 0;
  for (int root : layers.followers) {
    if (component[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<int> members;
    std::set<int> leaders;
    std::deque<int> queue{root};
    component[static_cast<std::size_t>(root)] = next;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      members.push_back(v);
      for (int w : g.neighbors(v)) {
        if (layers.is_leader(w)) leaders.insert(w);
        if (layers.is_follower(w) && component[static_cast<std::size_t>(w)] < 0) {
          component[static_cast<std::size_t>(w)] = next;
          queue.push_back(w);
        }
      }
    }
    for (int v : members) out[static_cast<std::size_t>(v)].assign(leaders.begin(), leaders.end());
    ++next;
  }
  return out;
}

}  // namespace

double energy_upsilon(const SwarmView& view, const LayerPartition& layers, const BoundedPotential& pot,
                      const AdaptiveGains& gains, const FollowerParams& params, double alpha_bar, double H) {
  const double floor = pot.minimum_value();
  const auto leader_sets = follower_leader_sets(view.graph, layers);
  double total = H;
  for (int i : layers.followers) {
    const auto& L = leader_sets[static_cast<std::size_t>(i)];
    const double s = static_cast<double>(L.size());
    for (int j : L) {
      total += 0.5 * view.relative_velocity(i, j).squaredNorm();
    }
    for (int p : view.graph.neighbors(i)) {
      const double shifted = pot.value(view.relative_position(i, p).norm()).total - floor;
      const Edge e = make_edge(i, p);
      const double da = gains.at(i, p) - alpha_bar;
      if (layers.is_leader(p)) {
        if (std::binary_search(L.begin(), L.end(), p)) total += shifted;
        total += da * da / (2.0 * params.gamma_for(e));
      } else if (layers.is_follower(p)) {
        total += 0.5 * s * shifted;
        total += s * da * da / (4.0 * params.gamma_for(e));
      }
    }
  }
  return total;
}

double alpha_bound_diagnostic(double mu_bar, std::span<const double> lambda_mins) {
  if (lambda_mins.empty()) throw std::invalid_argument("alpha_bound_diagnostic: no leader-follower structure");
  const double lambda = *std::min_element(lambda_mins.begin(), lambda_mins.end());
  return mu_bar / std::sqrt(lambda);
}

Dynamics::Dynamics(const ScenarioConfig& cfg)
    : n_(cfg.N),
      m_(cfg.m),
      off_v_(cfg.m * cfg.N),
      off_vF_(2 * cfg.m * cfg.N),
      off_CF_(off_vF_ + cfg.m),
      off_k_(off_CF_ + 3 * cfg.m),
      off_alpha_(off_k_ + 3),
      cfg_(cfg),
      potential_(cfg.R, cfg.E) {
  if (static_cast<int>(cfg.initial.size()) != cfg.N) throw std::invalid_argument("Dynamics: initial state count");
  const AgentMatrix x0 = stack_positions(cfg.initial);
  const AgentMatrix v0 = stack_velocities(cfg.initial);
  graph0_ = build_graph(x0, cfg.R);
  layers_ = layer_partition(graph0_, cfg.malicious_id);

  formation_.malicious = cfg.malicious_id;
  if (cfg.mode == ControlMode::Hierarchical && !layers_.leaders.empty()) {
    if (!cfg.leader.desired_displacements.empty()) {
      formation_.displacement = cfg.leader.desired_displacements;
    } else {
      formation_ = assign_polygon(cfg.malicious_id, layers_.leaders, x0, cfg.leader.delta_bar, cfg.leader.orientation);
    }
  }

  law_.kappa_v = cfg.leader.kappa_v;
  law_.kappa_x = cfg.leader.kappa_x;
  law_.R = cfg.R;
  law_.iota = cfg.leader.iota;
  law_.formation = &formation_;
  if (!formation_.displacement.empty()) {
    law_.bar_H = cfg.leader.bar_H.value_or(
        compute_bar_H(x0, v0, graph0_, formation_, law_.kappa_x, cfg.R, cfg.estimator, cfg.malicious));
  }
}

int Dynamics::state_size() const { return off_alpha_ + AdaptiveGains::pair_count(n_); }

Eigen::VectorXd Dynamics::initial_state() const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(state_size());
  const AgentMatrix x0 = stack_positions(cfg_.initial);
  const AgentMatrix v0 = stack_velocities(cfg_.initial);
  y.segment(0, off_v_) = x0.reshaped();
  y.segment(off_v_, off_v_) = v0.reshaped();
  y.segment(off_vF_, m_) = v0.col(cfg_.malicious_id);
  // CF(0) = 0 already.
  y.segment(off_k_, 3) = cfg_.estimator.k_hat0;
  AdaptiveGains alpha(n_, cfg_.follower.alpha0);
  for (const auto& [e, a0] : cfg_.follower.edge_alpha0) alpha.set(e.i, e.j, a0);
  y.segment(off_alpha_, AdaptiveGains::pair_count(n_)) =
      Eigen::Map<const Eigen::VectorXd>(alpha.values().data(), AdaptiveGains::pair_count(n_));
  return y;
}

AgentMatrix Dynamics::positions(const Eigen::VectorXd& y) const {
  return Eigen::Map<const Eigen::MatrixXd>(y.data(), m_, n_);
}

AgentMatrix Dynamics::velocities(const Eigen::VectorXd& y) const {
  return Eigen::Map<const Eigen::MatrixXd>(y.data() + off_v_, m_, n_);
}

EstimatorState Dynamics::estimator(const Eigen::VectorXd& y) const {
  EstimatorState est;
  est.vF = y.segment(off_vF_, m_);
  est.CF = Eigen::Map<const Eigen::MatrixXd>(y.data() + off_CF_, m_, 3);
  est.k_hat = y.segment<3>(off_k_);
  est.a = cfg_.estimator.a;
  est.Gamma = cfg_.estimator.Gamma;
  return est;
}

AdaptiveGains Dynamics::gains(const Eigen::VectorXd& y) const {
  AdaptiveGains g(n_);
  const auto count = AdaptiveGains::pair_count(n_);
  std::copy(y.data() + off_alpha_, y.data() + off_alpha_ + count, g.values().begin());
  return g;
}

Eigen::VectorXd Dynamics::derivative(const Eigen::VectorXd& y, Outputs* out) const {
  const AgentMatrix X = positions(y);
  const AgentMatrix V = velocities(y);
  ProximityGraph g = build_graph(X, cfg_.R);
  const SwarmView view{X, V, g};
  const int i_f = cfg_.malicious_id;

  const EstimatorState est = estimator(y);
  const Regressor C = regressor(i_f, view, potential_);
  const Vec v_if = V.col(i_f);

  AgentMatrix U = AgentMatrix::Zero(m_, n_);
  U.col(i_f) = u_malicious(i_f, view, potential_, cfg_.malicious);

  Eigen::VectorXd dy = Eigen::VectorXd::Zero(y.size());
  if (cfg_.mode == ControlMode::Conventional) {
    for (int i = 0; i < n_; ++i) {
      if (i != i_f) U.col(i) = u_normal(i, view, potential_);
    }
  } else {
    const AdaptiveGains alpha = gains(y);
    for (int j : layers_.leaders) U.col(j) = u_leader(j, view, layers_, law_, est.k_hat, C);
    for (int k : layers_.followers) {
      FollowerCommand cmd = u_follower(k, view, potential_, alpha, cfg_.follower);
      U.col(k) = cmd.control;
      for (const auto& [e, rate] : cmd.alpha_rate) dy(off_alpha_ + alpha.index(e.i, e.j)) = rate;
    }
  }

  Vec velocity_sums = Vec::Zero(m_);
  for (int j : g.neighbors(i_f)) velocity_sums += V.col(j) - v_if;

  const FilterDerivatives filt = filter_derivatives(est, v_if, C);
  dy.segment(0, off_v_) = y.segment(off_v_, off_v_);
  dy.segment(off_v_, off_v_) = U.reshaped();
  dy.segment(off_vF_, m_) = filt.dvF;
  dy.segment(off_CF_, 3 * m_) = filt.dCF.reshaped();
  dy.segment<3>(off_k_) = estimate_derivative(est, C, velocity_sums, v_if);

  if (out != nullptr) {
    out->controls = std::move(U);
    out->C = C;
    out->graph = std::move(g);
  }
  return dy;
}

Eigen::VectorXd Dynamics::step(const Eigen::VectorXd& y, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  return step(y, dt, derivative(y));
}

Eigen::VectorXd Dynamics::step(const Eigen::VectorXd& y, double dt, const Eigen::VectorXd& k1) const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const Eigen::VectorXd k2 = derivative(y + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = derivative(y + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = derivative(y + dt * k3);
  Eigen::VectorXd next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalAbort("non-finite state after step");
  return next;
}

AlphaDiagnostic alpha_bound_diagnostic(const SimulationRecord& record) {
  AlphaDiagnostic d;
  d.mu = record.leader_control_sup;
  d.mu_bar = std::sqrt(static_cast<double>(record.max_follower_set)) * d.mu;
  if (!record.alpha.empty()) {
    for (double a : record.alpha.back()) d.alpha_max = std::max(d.alpha_max, a);
  }
  if (record.lambda_min0.empty()) return d;
  d.available = true;
  d.lambda_min = *std::min_element(record.lambda_min0.begin(), record.lambda_min0.end());
  d.alpha_required = alpha_bound_diagnostic(d.mu_bar, record.lambda_min0);
  return d;
}

namespace {

std::string edge_scope(const LayerPartition& layers, int a, int b) {
  using Role = LayerPartition::Role;
  const Role ra = layers.role(a);
  const Role rb = layers.role(b);
  if (ra != Role::Follower && rb != Role::Follower) return "group";
  if (ra == Role::Follower && rb == Role::Follower) return "follower";
  if (ra == Role::Malicious || rb == Role::Malicious) return "malicious-follower";
  return "leader-follower";
}

std::string payload_scope(const std::string& payload) {
  const auto pos = payload.rfind(' ');
  return pos == std::string::npos ? payload : payload.substr(pos + 1);
}

double velocity_spread(const AgentMatrix& V) {
  double spread = 0.0;
  for (Eigen::Index i = 0; i < V.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < V.cols(); ++j) spread = std::max(spread, (V.col(i) - V.col(j)).norm());
  }
  return spread;
}

class Monitor {
 public:
  Monitor(const Dynamics& dyn, SimulationRecord& rec) : dyn_(dyn), cfg_(dyn.config()), rec_(rec) {}

  void observe(int n, double t, const Eigen::VectorXd& y, const Dynamics::Outputs& out, bool sample) {
    const AgentMatrix X = dyn_.positions(y);
    const AgentMatrix V = dyn_.velocities(y);
    const ProximityGraph& g = out.graph;
    const SwarmView view{X, V, g};
    const auto& layers = dyn_.layers();
    const int i_f = cfg_.malicious_id;

    if (n > 0) log_edges(t, g);
    prev_graph_ = g;

    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg_.N; ++i) {
      for (int j = i + 1; j < cfg_.N; ++j) {
        const double d = (X.col(i) - X.col(j)).norm();
        dmin = std::min(dmin, d);
        const bool close = d < cfg_.monitor.collision_threshold;
        const bool was = colliding_.count({i, j}) > 0;
        if (close && !was) {
          colliding_.insert({i, j});
          std::ostringstream p;
          p << i << ' ' << j << " d=" << d;
          rec_.events.push_back({t, EventKind::Collision, p.str()});
        } else if (!close && was) {
          colliding_.erase({i, j});
        }
      }
    }
    rec_.min_distance_overall = n == 0 ? dmin : std::min(rec_.min_distance_overall, dmin);

    for (int j : layers.leaders) {
      const double d = (X.col(j) - X.col(i_f)).norm();
      if (d >= cfg_.R && escaped_.insert(j).second) {
        std::ostringstream p;
        p << j << " d=" << d;
        rec_.events.push_back({t, EventKind::Escape, p.str()});
      }
    }

    for (int j : layers.leaders) {
      rec_.leader_control_sup = std::max(rec_.leader_control_sup, out.controls.col(j).lpNorm<1>());
    }

    const bool hierarchical = cfg_.mode == ControlMode::Hierarchical && !dyn_.formation().displacement.empty();
    const EstimatorState est = dyn_.estimator(y);
    double H = std::numeric_limits<double>::quiet_NaN();
    if (hierarchical) {
      H = energy_H(view, layers, dyn_.leader_law(), cfg_.malicious.gains(), est.k_hat, est.Gamma);
      if (n == 0) {
        rec_.H0 = H;
      } else {
        rec_.H_max_increase = std::max(rec_.H_max_increase, H - last_H_);
      }
      last_H_ = H;
    }

    if (!sample) return;
    rec_.times.push_back(t);
    rec_.positions.push_back(X);
    rec_.velocities.push_back(V);
    rec_.controls.push_back(out.controls);
    rec_.H.push_back(H);
    rec_.upsilon.push_back(std::numeric_limits<double>::quiet_NaN());
    rec_.min_distance.push_back(dmin);
    rec_.velocity_spread.push_back(velocity_spread(V));
    const ContainmentReport cr = containment_check(view, out.controls.col(i_f), layers, cfg_.leader.delta_bar,
                                                   cfg_.monitor.tol_u, cfg_.monitor.tol_d);
    rec_.containment_residual.push_back(cr.acceleration_residual);
    rec_.max_distance_error.push_back(cr.max_distance_error);
    rec_.estimator_residual.push_back(prediction_residual(est, V.col(i_f)));
    rec_.k_hat.push_back(est.k_hat);
    rec_.alpha.push_back(dyn_.gains(y).values());
  }

 private:
  void log_edges(double t, const ProximityGraph& g) {
    const auto before = prev_graph_.edges();
    const auto after = g.edges();
    std::vector<Edge> lost;
    std::vector<Edge> added;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(lost));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(added));
    for (const Edge& e : lost) {
      rec_.events.push_back({t, EventKind::EdgeLost, payload(e)});
    }
    for (const Edge& e : added) {
      rec_.events.push_back({t, EventKind::EdgeAdded, payload(e)});
    }
  }

  std::string payload(const Edge& e) const {
    std::ostringstream p;
    p << e.i << ' ' << e.j << ' ' << edge_scope(dyn_.layers(), e.i, e.j);
    return p.str();
  }

  const Dynamics& dyn_;
  const ScenarioConfig& cfg_;
  SimulationRecord& rec_;
  ProximityGraph prev_graph_;
  std::set<std::pair<int, int>> colliding_;
  std::set<int> escaped_;
  double last_H_ = 0.0;
};

}  // namespace

SimulationRecord run(const ScenarioConfig& cfg, RunOptions options) {
  ValidationReport report = validate_scenario(cfg);
  if (!report.ok() && !options.force) throw ValidationError(std::move(report));

  const Dynamics dyn(cfg);
  SimulationRecord rec;
  rec.agents = cfg.N;
  rec.dim = cfg.m;
  rec.malicious_id = cfg.malicious_id;
  rec.layers = dyn.layers();
  const bool hierarchical = cfg.mode == ControlMode::Hierarchical && !dyn.formation().displacement.empty();
  rec.bar_H = hierarchical ? dyn.bar_H() : std::numeric_limits<double>::quiet_NaN();
  if (!hierarchical) rec.H0 = std::numeric_limits<double>::quiet_NaN();
  for (int j : rec.layers.leaders) {
    const auto followers = reachable_followers(dyn.initial_graph(), rec.layers, j);
    if (followers.empty()) continue;
    rec.max_follower_set = std::max(rec.max_follower_set, static_cast<int>(followers.size()));
    rec.lambda_min0.push_back(leader_follower_matrix(dyn.initial_graph(), rec.layers, j).lambda_min);
  }

  const auto n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  Monitor monitor(dyn, rec);
  Eigen::VectorXd y = dyn.initial_state();
  for (int n = 0;; ++n) {
    const double t = n * cfg.dt;
    Dynamics::Outputs out;
    Eigen::VectorXd k1;
    try {
      k1 = dyn.derivative(y, &out);
    } catch (const std::logic_error& ex) {
      // Domain errors from the potentials: an infeasible formation at t = 0,
      // or a state that left the barrier region.
      if (n == 0) throw NumericalAbort(std::string("cannot evaluate the dynamics at t = 0: ") + ex.what());
      rec.aborted = true;
      rec.abort_reason = ex.what();
      break;
    }
    const bool last = n == n_steps;
    monitor.observe(n, t, y, out, last || n % cfg.monitor.record_every == 0);
    rec.steps = n;
    if (last) break;
    try {
      y = dyn.step(y, cfg.dt, k1);
    } catch (const NumericalAbort& ex) {
      rec.aborted = true;
      rec.abort_reason = std::string(ex.what()) + " at t = " + std::to_string(t + cfg.dt);
      if (rec.times.empty() || rec.times.back() != t) monitor.observe(n, t, y, out, true);
      break;
    } catch (const std::logic_error& ex) {
      rec.aborted = true;
      rec.abort_reason = ex.what();
      if (rec.times.empty() || rec.times.back() != t) monitor.observe(n, t, y, out, true);
      break;
    }
  }

  // Upsilon needs alpha_bar, which by default comes from this run's own
  // leader control history.
  const AlphaDiagnostic diag = alpha_bound_diagnostic(rec);
  rec.alpha_bar = cfg.monitor.alpha_bar.value_or(diag.available ? diag.alpha_required : 0.0);
  if (hierarchical) {
    for (std::size_t s = 0; s < rec.times.size(); ++s) {
      const ProximityGraph g = build_graph(rec.positions[s], cfg.R);
      const SwarmView view{rec.positions[s], rec.velocities[s], g};
      AdaptiveGains gains(cfg.N);
      gains.values() = rec.alpha[s];
      rec.upsilon[s] =
          energy_upsilon(view, rec.layers, dyn.potential(), gains, cfg.follower, rec.alpha_bar, rec.H[s]);
    }
  }
  return rec;
}

ProblemSummary summarize(const SimulationRecord& record, const ScenarioConfig& cfg) {
  ProblemSummary s;
  if (record.times.empty()) throw std::invalid_argument("summarize: empty record");
  s.t_end = record.times.back();
  s.velocity_spread_initial = record.velocity_spread.front();
  s.velocity_spread_final = record.velocity_spread.back();
  s.velocity_consensus = s.velocity_spread_final < cfg.monitor.spread_ratio * s.velocity_spread_initial ||
                         s.velocity_spread_final == 0.0;

  const ProximityGraph g = build_graph(record.positions.back(), cfg.R);
  const SwarmView view{record.positions.back(), record.velocities.back(), g};
  s.containment = containment_check(view, record.controls.back().col(cfg.malicious_id), record.layers,
                                    cfg.leader.delta_bar, cfg.monitor.tol_u, cfg.monitor.tol_d);

  s.min_distance = record.min_distance_overall;
  bool collided = false;
  s.group_edges_preserved = true;
  s.follower_edges_preserved = true;
  for (const Event& e : record.events) {
    if (e.kind == EventKind::Collision) collided = true;
    if (e.kind == EventKind::Escape) ++s.escapes;
    if (e.kind == EventKind::EdgeLost) {
      const std::string scope = payload_scope(e.payload);
      if (scope == "group") s.group_edges_preserved = false;
      if (scope == "follower" || scope == "leader-follower") s.follower_edges_preserved = false;
    }
  }
  s.collision_free = !collided && s.min_distance > cfg.monitor.collision_threshold;
  s.H0 = record.H0;
  s.bar_H = record.bar_H;
  s.H_max_increase = record.H_max_increase;
  s.alpha = alpha_bound_diagnostic(record);
  s.aborted = record.aborted;
  s.abort_reason = record.abort_reason;
  return s;
}

}  // namespace flocksim
