#pragma once

#include "flocksim/controllers.hpp"
#include "flocksim/core.hpp"
#include "flocksim/estimator.hpp"
#include "flocksim/potentials.hpp"
#include "flocksim/topology.hpp"

#include <span>
#include <string>
#include <vector>

namespace flocksim {

enum class EventKind { EdgeAdded, EdgeLost, Collision, Escape };

std::string_view to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::EdgeAdded;
  std::string payload;
};

struct ContainmentReport {
  bool contained = false;
  bool acceleration_ok = false;
  bool distances_ok = false;
  double acceleration_residual = 0.0;
  double max_distance_error = 0.0;
  std::vector<std::pair<int, double>> distance_errors;  // leader id -> | |x_{i_f j}| - delta_bar |
};

/// Containment test: |u_{i_f}| <= tol_u and every leader within tol_d of delta_bar.
ContainmentReport containment_check(const SwarmView& view, const Vec& u_malicious, const LayerPartition& layers,
                                    double delta_bar, double tol_u, double tol_d);

/// Group energy: shape potentials, relative kinetic energy and the
/// parameter-error term. Uses the true gains, so it is a monitor only.
double energy_H(const SwarmView& view, const LayerPartition& layers, const LeaderLaw& law,
                const Eigen::Vector3d& k_true, const Eigen::Vector3d& k_hat, const Eigen::Matrix3d& Gamma);

/// Whole-swarm energy: H plus leader/follower potentials and relative
/// kinetic energy, plus the adaptive-gain error terms around alpha_bar.
/// Pair potentials enter relative to their minimum value.
double energy_upsilon(const SwarmView& view, const LayerPartition& layers, const BoundedPotential& pot,
                      const AdaptiveGains& gains, const FollowerParams& params, double alpha_bar, double H);

/// alpha_bar_required = mu_bar / min_j sqrt(lambda_min(R_j(0))).
/// Throws std::invalid_argument when `lambda_mins` is empty.
double alpha_bound_diagnostic(double mu_bar, std::span<const double> lambda_mins);

/// Coupled right-hand side of the swarm, filters, estimate and adaptive gains.
/// Packed state layout: positions (m*N), velocities (m*N), vF (m), CF (3m),
/// k_hat (3), alpha (N(N-1)/2).
class Dynamics {
 public:
  explicit Dynamics(const ScenarioConfig& cfg);
  Dynamics(const Dynamics&) = delete;
  Dynamics& operator=(const Dynamics&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  const LayerPartition& layers() const { return layers_; }
  const Formation& formation() const { return formation_; }
  const LeaderLaw& leader_law() const { return law_; }
  const BoundedPotential& potential() const { return potential_; }
  const ProximityGraph& initial_graph() const { return graph0_; }
  double bar_H() const { return law_.bar_H; }

  int state_size() const;
  Eigen::VectorXd initial_state() const;

  AgentMatrix positions(const Eigen::VectorXd& y) const;
  AgentMatrix velocities(const Eigen::VectorXd& y) const;
  EstimatorState estimator(const Eigen::VectorXd& y) const;
  AdaptiveGains gains(const Eigen::VectorXd& y) const;

  struct Outputs {
    AgentMatrix controls;
    Regressor C;
    ProximityGraph graph;
  };

  Eigen::VectorXd derivative(const Eigen::VectorXd& y, Outputs* out = nullptr) const;

  /// One classical fourth-order Runge-Kutta step. Throws std::invalid_argument
  /// for dt <= 0 and NumericalAbort when the result is not finite.
  Eigen::VectorXd step(const Eigen::VectorXd& y, double dt) const;

  /// Same step reusing a precomputed first stage k1 = derivative(y).
  Eigen::VectorXd step(const Eigen::VectorXd& y, double dt, const Eigen::VectorXd& k1) const;

 private:
  int n_;
  int m_;
  int off_v_;
  int off_vF_;
  int off_CF_;
  int off_k_;
  int off_alpha_;
  ScenarioConfig cfg_;
  BoundedPotential potential_;
  ProximityGraph graph0_;
  LayerPartition layers_;
  Formation formation_;
  LeaderLaw law_;
};

struct SimulationRecord {
  int agents = 0;
  int dim = 0;
  int malicious_id = 0;

  std::vector<double> times;
  std::vector<AgentMatrix> positions;
  std::vector<AgentMatrix> velocities;
  std::vector<AgentMatrix> controls;
  std::vector<double> H;
  std::vector<double> upsilon;
  std::vector<double> min_distance;
  std::vector<double> velocity_spread;
  std::vector<double> containment_residual;
  std::vector<double> max_distance_error;
  std::vector<double> estimator_residual;
  std::vector<Eigen::Vector3d> k_hat;
  std::vector<std::vector<double>> alpha;
  std::vector<Event> events;

  LayerPartition layers;
  double bar_H = 0.0;
  double H0 = 0.0;
  double H_max_increase = 0.0;       // largest single-step increase of H
  double min_distance_overall = 0.0; // over every step, not just samples
  double leader_control_sup = 0.0;   // mu = sup_t max_j |u_j|_1 over leaders
  int max_follower_set = 0;          // max_j |F(j)| at t = 0
  std::vector<double> lambda_min0;   // lambda_min(R_j(0)) per leader with followers
  double alpha_bar = 0.0;            // constant used in the Upsilon monitor
  int steps = 0;

  bool aborted = false;
  std::string abort_reason;
};

struct AlphaDiagnostic {
  double mu = 0.0;
  double mu_bar = 0.0;
  double lambda_min = 0.0;
  double alpha_required = 0.0;
  double alpha_max = 0.0;
  bool available = false;
};

/// mu_bar = sqrt(max_j |F(j)|) * mu measured from the record.
AlphaDiagnostic alpha_bound_diagnostic(const SimulationRecord& record);

struct ProblemSummary {
  double t_end = 0.0;
  double velocity_spread_initial = 0.0;
  double velocity_spread_final = 0.0;
  bool velocity_consensus = false;
  ContainmentReport containment;
  double min_distance = 0.0;
  bool collision_free = false;
  bool group_edges_preserved = false;
  bool follower_edges_preserved = false;
  int escapes = 0;
  double H0 = 0.0;
  double bar_H = 0.0;
  double H_max_increase = 0.0;
  AlphaDiagnostic alpha;
  bool aborted = false;
  std::string abort_reason;
};

ProblemSummary summarize(const SimulationRecord& record, const ScenarioConfig& cfg);

struct RunOptions {
  bool force = false;
};

/// Integrates the scenario over [0, t_end]. Throws ValidationError when the
/// scenario fails validation and `force` is not set, and NumericalAbort when
/// the dynamics cannot be evaluated at t = 0 (an infeasible forced
/// formation). A non-finite state later on stops the run and is reported
/// through `aborted`; the record keeps the last good state. H, Upsilon, H0
/// and bar_H are NaN in conventional mode.
SimulationRecord run(const ScenarioConfig& cfg, RunOptions options = {});

}  // namespace flocksim
