#include "flocksim/io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace flocksim {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) throw ScenarioError(where + ": missing key '" + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ScenarioError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ScenarioError(where + ": expected an integer");
  return j.get<int>();
}

Vec vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::map<Edge, double> edge_map(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array");
  std::map<Edge, double> out;
  for (const auto& item : j) {
    expect_object(item, where, {"i", "j", "value"});
    const int a = integer(item["i"], where + ".i");
    const int b = integer(item["j"], where + ".j");
    if (a == b) throw ScenarioError(where + ": self pair");
    out[make_edge(a, b)] = number(item["value"], where + ".value");
  }
  return out;
}

json edge_map_json(const std::map<Edge, double>& m) {
  json out = json::array();
  for (const auto& [e, v] : m) out.push_back({{"i", e.i}, {"j", e.j}, {"value", v}});
  return out;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  expect_object(doc, "scenario",
                {"schema_version", "N", "m", "R", "E", "malicious_id", "malicious", "leader", "follower", "estimator",
                 "initial_states", "dt", "t_end", "seed", "control_mode", "monitor"});
  if (!doc["schema_version"].is_string() || doc["schema_version"].get<std::string>() != kSchemaVersion) {
    throw ScenarioError(std::string("schema_version must be \"") + kSchemaVersion + "\"");
  }

  ScenarioConfig cfg;
  cfg.N = integer(doc["N"], "N");
  cfg.m = integer(doc["m"], "m");
  cfg.R = number(doc["R"], "R");
  cfg.E = number(doc["E"], "E");
  cfg.malicious_id = integer(doc["malicious_id"], "malicious_id");

  const json& mal = doc["malicious"];
  expect_object(mal, "malicious", {"k_v", "k_a", "k_r", "bound_v", "bound_a", "bound_r"});
  cfg.malicious.k_v = number(mal["k_v"], "malicious.k_v");
  cfg.malicious.k_a = number(mal["k_a"], "malicious.k_a");
  cfg.malicious.k_r = number(mal["k_r"], "malicious.k_r");
  cfg.malicious.bound_v = number(mal["bound_v"], "malicious.bound_v");
  cfg.malicious.bound_a = number(mal["bound_a"], "malicious.bound_a");
  cfg.malicious.bound_r = number(mal["bound_r"], "malicious.bound_r");

  const json& lead = doc["leader"];
  expect_object(lead, "leader", {"kappa_v", "kappa_x", "delta_bar", "iota"},
                {"bar_H", "orientation", "desired_displacements"});
  cfg.leader.kappa_v = number(lead["kappa_v"], "leader.kappa_v");
  cfg.leader.kappa_x = number(lead["kappa_x"], "leader.kappa_x");
  cfg.leader.delta_bar = number(lead["delta_bar"], "leader.delta_bar");
  cfg.leader.iota = number(lead["iota"], "leader.iota");
  if (lead.contains("bar_H")) cfg.leader.bar_H = number(lead["bar_H"], "leader.bar_H");
  if (lead.contains("orientation")) cfg.leader.orientation = number(lead["orientation"], "leader.orientation");
  if (lead.contains("desired_displacements")) {
    const json& dd = lead["desired_displacements"];
    if (!dd.is_array()) throw ScenarioError("leader.desired_displacements: expected an array");
    for (const auto& item : dd) {
      expect_object(item, "leader.desired_displacements", {"id", "x"});
      const int id = integer(item["id"], "leader.desired_displacements.id");
      if (!cfg.leader.desired_displacements.emplace(id, vector(item["x"], "leader.desired_displacements.x")).second) {
        throw ScenarioError("leader.desired_displacements: duplicate id " + std::to_string(id));
      }
    }
  }

  const json& fol = doc["follower"];
  expect_object(fol, "follower", {"gamma", "alpha0", "sgn_deadband"}, {"edge_gamma", "edge_alpha0"});
  cfg.follower.gamma = number(fol["gamma"], "follower.gamma");
  cfg.follower.alpha0 = number(fol["alpha0"], "follower.alpha0");
  cfg.follower.sgn_deadband = number(fol["sgn_deadband"], "follower.sgn_deadband");
  if (fol.contains("edge_gamma")) cfg.follower.edge_gamma = edge_map(fol["edge_gamma"], "follower.edge_gamma");
  if (fol.contains("edge_alpha0")) cfg.follower.edge_alpha0 = edge_map(fol["edge_alpha0"], "follower.edge_alpha0");

  const json& est = doc["estimator"];
  expect_object(est, "estimator", {"a", "Gamma", "k_hat0"});
  cfg.estimator.a = number(est["a"], "estimator.a");
  const json& G = est["Gamma"];
  if (!G.is_array() || G.size() != 3) throw ScenarioError("estimator.Gamma: expected a 3x3 array");
  for (int r = 0; r < 3; ++r) {
    const Vec row = vector(G[static_cast<std::size_t>(r)], "estimator.Gamma");
    if (row.size() != 3) throw ScenarioError("estimator.Gamma: expected a 3x3 array");
    cfg.estimator.Gamma.row(r) = row.transpose();
  }
  const Vec k0 = vector(est["k_hat0"], "estimator.k_hat0");
  if (k0.size() != 3) throw ScenarioError("estimator.k_hat0: expected three numbers");
  cfg.estimator.k_hat0 = k0;

  const json& init = doc["initial_states"];
  if (!init.is_array()) throw ScenarioError("initial_states: expected an array");
  for (const auto& item : init) {
    expect_object(item, "initial_states", {"id", "position", "velocity"});
    cfg.initial.push_back({integer(item["id"], "initial_states.id"), vector(item["position"], "initial_states.position"),
                           vector(item["velocity"], "initial_states.velocity")});
  }

  cfg.dt = number(doc["dt"], "dt");
  cfg.t_end = number(doc["t_end"], "t_end");
  if (!doc["seed"].is_number_unsigned()) throw ScenarioError("seed: expected a non-negative integer");
  cfg.seed = doc["seed"].get<std::uint64_t>();
  if (!doc["control_mode"].is_string()) throw ScenarioError("control_mode: expected a string");
  try {
    cfg.mode = control_mode_from_string(doc["control_mode"].get<std::string>());
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(ex.what());
  }

  const json& mon = doc["monitor"];
  expect_object(mon, "monitor", {"collision_threshold", "tol_u", "tol_d", "spread_ratio", "record_every"},
                {"alpha_bar"});
  cfg.monitor.collision_threshold = number(mon["collision_threshold"], "monitor.collision_threshold");
  cfg.monitor.tol_u = number(mon["tol_u"], "monitor.tol_u");
  cfg.monitor.tol_d = number(mon["tol_d"], "monitor.tol_d");
  cfg.monitor.spread_ratio = number(mon["spread_ratio"], "monitor.spread_ratio");
  cfg.monitor.record_every = integer(mon["record_every"], "monitor.record_every");
  if (mon.contains("alpha_bar")) cfg.monitor.alpha_bar = number(mon["alpha_bar"], "monitor.alpha_bar");
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["N"] = cfg.N;
  doc["m"] = cfg.m;
  doc["R"] = cfg.R;
  doc["E"] = cfg.E;
  doc["malicious_id"] = cfg.malicious_id;
  doc["malicious"] = {{"k_v", cfg.malicious.k_v},         {"k_a", cfg.malicious.k_a},
                      {"k_r", cfg.malicious.k_r},         {"bound_v", cfg.malicious.bound_v},
                      {"bound_a", cfg.malicious.bound_a}, {"bound_r", cfg.malicious.bound_r}};

  json lead = {{"kappa_v", cfg.leader.kappa_v},
               {"kappa_x", cfg.leader.kappa_x},
               {"delta_bar", cfg.leader.delta_bar},
               {"iota", cfg.leader.iota}};
  if (cfg.leader.bar_H) lead["bar_H"] = *cfg.leader.bar_H;
  if (cfg.leader.orientation) lead["orientation"] = *cfg.leader.orientation;
  if (!cfg.leader.desired_displacements.empty()) {
    json dd = json::array();
    for (const auto& [id, x] : cfg.leader.desired_displacements) dd.push_back({{"id", id}, {"x", to_json(x)}});
    lead["desired_displacements"] = dd;
  }
  doc["leader"] = lead;

  json fol = {{"gamma", cfg.follower.gamma},
              {"alpha0", cfg.follower.alpha0},
              {"sgn_deadband", cfg.follower.sgn_deadband}};
  if (!cfg.follower.edge_gamma.empty()) fol["edge_gamma"] = edge_map_json(cfg.follower.edge_gamma);
  if (!cfg.follower.edge_alpha0.empty()) fol["edge_alpha0"] = edge_map_json(cfg.follower.edge_alpha0);
  doc["follower"] = fol;

  json gamma = json::array();
  for (int r = 0; r < 3; ++r) gamma.push_back(to_json(cfg.estimator.Gamma.row(r).transpose()));
  doc["estimator"] = {{"a", cfg.estimator.a}, {"Gamma", gamma}, {"k_hat0", to_json(cfg.estimator.k_hat0)}};

  json init = json::array();
  for (const auto& a : cfg.initial) {
    init.push_back({{"id", a.id}, {"position", to_json(a.position)}, {"velocity", to_json(a.velocity)}});
  }
  doc["initial_states"] = init;

  doc["dt"] = cfg.dt;
  doc["t_end"] = cfg.t_end;
  doc["seed"] = cfg.seed;
  doc["control_mode"] = std::string(to_string(cfg.mode));

  json mon = {{"collision_threshold", cfg.monitor.collision_threshold},
              {"tol_u", cfg.monitor.tol_u},
              {"tol_d", cfg.monitor.tol_d},
              {"spread_ratio", cfg.monitor.spread_ratio},
              {"record_every", cfg.monitor.record_every}};
  if (cfg.monitor.alpha_bar) mon["alpha_bar"] = *cfg.monitor.alpha_bar;
  doc["monitor"] = mon;
  return doc;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ScenarioError(path.string() + ": " + ex.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = scenario_from_json(doc);
  } catch (const json::exception& ex) {
    throw ScenarioError(path.string() + ": " + ex.what());
  }
  if (validate) {
    ValidationReport report = validate_scenario(cfg);
    if (!report.ok()) throw ValidationError(std::move(report));
  }
  return cfg;
}

void write_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file " + path.string());
  out << scenario_to_json(cfg).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace flocksim
