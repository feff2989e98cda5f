#include "flocksim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace flocksim {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

// Rounded to the same 12 digits as the CSV output; NaN becomes null.
json num(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::stod(format_number(value));
}

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

json summary_to_json(const ProblemSummary& s, const ScenarioConfig& cfg) {
  json distances = json::array();
  for (const auto& [id, err] : s.containment.distance_errors) distances.push_back({{"id", id}, {"error", num(err)}});

  json doc;
  doc["t_end"] = num(s.t_end);
  doc["control_mode"] = std::string(to_string(cfg.mode));
  doc["velocity"] = {{"spread_initial", num(s.velocity_spread_initial)},
                     {"spread_final", num(s.velocity_spread_final)},
                     {"consensus", s.velocity_consensus}};
  doc["containment"] = {{"contained", s.containment.contained},
                        {"acceleration_ok", s.containment.acceleration_ok},
                        {"distances_ok", s.containment.distances_ok},
                        {"acceleration_residual", num(s.containment.acceleration_residual)},
                        {"max_distance_error", num(s.containment.max_distance_error)},
                        {"distance_errors", distances}};
  doc["safety"] = {{"min_distance", num(s.min_distance)},
                   {"collision_free", s.collision_free},
                   {"group_edges_preserved", s.group_edges_preserved},
                   {"follower_edges_preserved", s.follower_edges_preserved},
                   {"escapes", s.escapes}};
  doc["energy"] = {{"H0", num(s.H0)}, {"bar_H", num(s.bar_H)}, {"H_max_increase", num(s.H_max_increase)}};
  doc["alpha"] = {{"available", s.alpha.available},
                  {"mu", num(s.alpha.mu)},
                  {"mu_bar", num(s.alpha.mu_bar)},
                  {"lambda_min", num(s.alpha.lambda_min)},
                  {"alpha_required", num(s.alpha.alpha_required)},
                  {"alpha_max", num(s.alpha.alpha_max)}};
  doc["tolerances"] = {{"collision_threshold", num(cfg.monitor.collision_threshold)},
                       {"tol_u", num(cfg.monitor.tol_u)},
                       {"tol_d", num(cfg.monitor.tol_d)},
                       {"spread_ratio", num(cfg.monitor.spread_ratio)},
                       {"delta_bar", num(cfg.leader.delta_bar)},
                       {"sgn_deadband", num(cfg.follower.sgn_deadband)}};
  doc["aborted"] = s.aborted;
  if (s.aborted) doc["abort_reason"] = s.abort_reason;
  return doc;
}

void write_outputs(const SimulationRecord& record, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const int m = record.dim;
  {
    const auto path = dir / "trajectory.csv";
    auto out = open(path);
    out << "t,agent_id";
    for (const char* prefix : {"x", "v", "u"}) {
      for (int c = 0; c < m; ++c) out << ',' << prefix << c;
    }
    out << '\n';
    for (std::size_t s = 0; s < record.times.size(); ++s) {
      for (int i = 0; i < record.agents; ++i) {
        out << format_number(record.times[s]) << ',' << i;
        for (const AgentMatrix* mat : {&record.positions[s], &record.velocities[s], &record.controls[s]}) {
          for (int c = 0; c < m; ++c) out << ',' << format_number((*mat)(c, i));
        }
        out << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = dir / "metrics.csv";
    auto out = open(path);
    out << "t,H,Upsilon,min_dist,vel_spread,containment_residual,estimator_residual,k_hat_v,k_hat_a,k_hat_r\n";
    for (std::size_t s = 0; s < record.times.size(); ++s) {
      out << format_number(record.times[s]) << ',' << format_number(record.H[s]) << ','
          << format_number(record.upsilon[s]) << ',' << format_number(record.min_distance[s]) << ','
          << format_number(record.velocity_spread[s]) << ',' << format_number(record.containment_residual[s]) << ','
          << format_number(record.estimator_residual[s]);
      for (int c = 0; c < 3; ++c) out << ',' << format_number(record.k_hat[s](c));
      out << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "events.log";
    auto out = open(path);
    for (const Event& e : record.events) {
      out << format_number(e.time) << ' ' << to_string(e.kind) << ' ' << e.payload << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "summary.json";
    auto out = open(path);
    out << summary_to_json(summarize(record, cfg), cfg).dump(2) << '\n';
    finish(out, path);
  }
}

}  // namespace flocksim
