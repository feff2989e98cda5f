#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flocksim {

/// Column vector in the swarm's m-dimensional space (m or m/s by context).
using Vec = Eigen::VectorXd;

/// Agent positions or velocities stacked column-wise, one column per agent.
using AgentMatrix = Eigen::MatrixXd;

struct AgentState {
  int id = 0;
  Vec position;
  Vec velocity;
};

/// Unordered agent pair, always stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Falsified controller gains of the malicious agent plus their admissible bounds.
struct MaliciousParams {
  double k_v = 1.0;
  double k_a = 1.0;
  double k_r = 1.0;
  double bound_v = 1.0;
  double bound_a = 1.0;
  double bound_r = 1.0;

  Eigen::Vector3d gains() const { return {k_v, k_a, k_r}; }
  Eigen::Vector3d bounds() const { return {bound_v, bound_a, bound_r}; }
};

struct LeaderParams {
  double kappa_v = 6.0;
  double kappa_x = 2.0;
  double delta_bar = 12.0;
  double iota = 1.0;
  // Computed from the initial conditions when absent.
  std::optional<double> bar_H;
  // Bearing of the first polygon vertex [rad]; defaults to the bearing of the
  // lowest-id leader as seen from the malicious agent.
  std::optional<double> orientation;
  // Leader id -> x*_{i_f j} (desired x_{i_f} - x_j). Generated when empty.
  std::map<int, Vec> desired_displacements;
};

struct FollowerParams {
  double gamma = 1.0;
  double alpha0 = 0.0;
  double sgn_deadband = 1e-3;
  std::map<Edge, double> edge_gamma;
  std::map<Edge, double> edge_alpha0;

  double gamma_for(Edge e) const {
    auto it = edge_gamma.find(e);
    return it == edge_gamma.end() ? gamma : it->second;
  }
  double alpha0_for(Edge e) const {
    auto it = edge_alpha0.find(e);
    return it == edge_alpha0.end() ? alpha0 : it->second;
  }
};

struct EstimatorGains {
  double a = 10.0;
  Eigen::Matrix3d Gamma = 10.0 * Eigen::Matrix3d::Identity();
  Eigen::Vector3d k_hat0 = Eigen::Vector3d::Ones();
};

enum class ControlMode {
  Hierarchical,  // leaders hold the containment polygon, followers run the adaptive law
  Conventional,  // every normal agent runs the plain flocking law
};

std::string_view to_string(ControlMode mode);
ControlMode control_mode_from_string(std::string_view name);

/// Thresholds used by monitors and end-of-run verdicts. None of them feed
/// back into the dynamics.
struct MonitorSettings {
  double collision_threshold = 1e-2;
  double tol_u = 0.05;
  double tol_d = 0.5;
  double spread_ratio = 0.01;
  int record_every = 1;
  std::optional<double> alpha_bar;
};

struct ScenarioConfig {
  int N = 0;
  int m = 2;
  double R = 0.0;
  double E = 0.0;
  int malicious_id = 0;
  MaliciousParams malicious;
  LeaderParams leader;
  FollowerParams follower;
  EstimatorGains estimator;
  std::vector<AgentState> initial;
  double dt = 1e-3;
  double t_end = 20.0;
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::Hierarchical;
  MonitorSettings monitor;
};

/// Resolved containment polygon: desired displacement x*_{i_f j} for every leader.
struct Formation {
  int malicious = 0;
  std::map<int, Vec> displacement;

  bool contains(int id) const { return id == malicious || displacement.count(id) > 0; }

  /// x*_{ab} for a, b in the group (malicious agent plus leaders).
  Vec desired(int a, int b) const;
};

Vec relative_position(const AgentState& a, const AgentState& b);

// Violation names reported by validate_scenario.
inline constexpr std::string_view kStructure = "structure";
inline constexpr std::string_view kAssumption1 = "Assumption 1";
inline constexpr std::string_view kAssumption2 = "Assumption 2";
inline constexpr std::string_view kAssumption3 = "Assumption 3";
inline constexpr std::string_view kAssumption4 = "Assumption 4";
inline constexpr std::string_view kDeltaBar = "delta_bar < R/2";
inline constexpr std::string_view kEnergyCeiling = "E > Q_bar";
inline constexpr std::string_view kDesiredDisplacements = "desired displacements";

struct Violation {
  std::string check;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view check) const;
  std::string describe() const;
};

/// Checks the scenario against the standing assumptions. Violations are
/// returned as data; this never throws.
ValidationReport validate_scenario(const ScenarioConfig& cfg);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report)
      : std::runtime_error("scenario validation failed: " + report.describe()),
        report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stack agent positions (or velocities) into an m x N matrix ordered by id.
AgentMatrix stack_positions(const std::vector<AgentState>& agents);
AgentMatrix stack_velocities(const std::vector<AgentState>& agents);

}  // namespace flocksim
