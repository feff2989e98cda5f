#include "flocksim/controllers.hpp"
#include "flocksim/engine.hpp"
#include "flocksim/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace flocksim;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kAborted = 2, kIo = 3, kUsage = 64 };

void print_violations(const ValidationReport& report, std::ostream& out) {
  for (const auto& v : report.violations) out << "  " << v.check << ": " << v.detail << '\n';
}

struct RunResult {
  int code = kOk;
  std::string message;
};

RunResult run_scenario(const fs::path& path, const fs::path& out_dir, std::optional<double> dt,
                       std::optional<double> t_end, bool force) {
  std::ostringstream msg;
  try {
    ScenarioConfig cfg = parse_scenario(path, false);
    if (dt) cfg.dt = *dt;
    if (t_end) cfg.t_end = *t_end;
    const ValidationReport report = validate_scenario(cfg);
    if (!report.ok()) {
      msg << path.string() << ": validation failed\n";
      print_violations(report, msg);
      if (!force) return {kInvalid, msg.str()};
      msg << "  continuing (--force)\n";
    }
    const SimulationRecord record = run(cfg, RunOptions{force});
    write_outputs(record, cfg, out_dir);
    const ProblemSummary s = summarize(record, cfg);
    msg << path.string() << ": t=" << format_number(s.t_end) << " contained=" << (s.containment.contained ? "yes" : "no")
        << " spread=" << format_number(s.velocity_spread_final) << " min_dist=" << format_number(s.min_distance)
        << " -> " << out_dir.string() << '\n';
    if (record.aborted) {
      msg << "  numerical abort: " << record.abort_reason << '\n';
      return {kAborted, msg.str()};
    }
    return {kOk, msg.str()};
  } catch (const IoError& ex) {
    return {kIo, msg.str() + "error: " + ex.what() + '\n'};
  } catch (const ScenarioError& ex) {
    return {kInvalid, msg.str() + "error: " + ex.what() + '\n'};
  } catch (const ValidationError& ex) {
    msg << "error: validation failed\n";
    print_violations(ex.report(), msg);
    return {kInvalid, msg.str()};
  } catch (const NumericalAbort& ex) {
    return {kAborted, msg.str() + "error: " + ex.what() + '\n'};
  } catch (const std::exception& ex) {
    return {kAborted, msg.str() + "error: " + ex.what() + '\n'};
  }
}

std::vector<double> parse_gains(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  if (out.size() != 3) throw std::invalid_argument("--k expects three comma-separated values");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical flocking simulator with malicious-agent containment"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  std::optional<double> dt;
  std::optional<double> t_end;
  bool force = false;
  auto* run_cmd = app.add_subcommand("run", "Integrate a scenario and write the output bundle");
  run_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--dt", dt, "Override the step size [s]");
  run_cmd->add_option("--t-end", t_end, "Override the final time [s]");
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_flag("--force", force, "Run even when validation fails");

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario against the standing assumptions");
  validate_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();

  int s = 0;
  double delta = 0.0;
  std::string gains;
  double R = 18.0 * std::sqrt(2.0);
  double E = 2.0e4;
  double orientation = 0.0;
  auto* balance_cmd = app.add_subcommand("balance", "Residual |u| of the malicious agent at the polygon");
  balance_cmd->add_option("--s", s, "Number of neighbors")->required();
  balance_cmd->add_option("--delta", delta, "Polygon radius [m]")->required();
  balance_cmd->add_option("--k", gains, "Malicious gains kv,ka,kr")->required();
  balance_cmd->add_option("--R", R, "Sensing radius [m]")->capture_default_str();
  balance_cmd->add_option("--E", E, "Potential ceiling")->capture_default_str();
  balance_cmd->add_option("--orientation", orientation, "Bearing of the first vertex [rad]")->capture_default_str();

  std::string batch_dir;
  std::string batch_out;
  auto* batch_cmd = app.add_subcommand("batch", "Run every scenario in a directory concurrently");
  batch_cmd->add_option("dir", batch_dir, "Directory of scenario JSON files")->required();
  batch_cmd->add_option("--out", batch_out, "Output root (default: <dir>/out)");
  batch_cmd->add_flag("--force", force, "Run even when validation fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (*run_cmd) {
    const RunResult r = run_scenario(scenario, out_dir, dt, t_end, force);
    (r.code == kOk ? std::cout : std::cerr) << r.message;
    return r.code;
  }

  if (*validate_cmd) {
    try {
      const ScenarioConfig cfg = parse_scenario(scenario, false);
      const ValidationReport report = validate_scenario(cfg);
      if (report.ok()) {
        std::cout << scenario << ": ok\n";
        return kOk;
      }
      std::cerr << scenario << ": validation failed\n";
      print_violations(report, std::cerr);
      return kInvalid;
    } catch (const IoError& ex) {
      std::cerr << "error: " << ex.what() << '\n';
      return kIo;
    } catch (const ScenarioError& ex) {
      std::cerr << "error: " << ex.what() << '\n';
      return kInvalid;
    }
  }

  if (*balance_cmd) {
    std::vector<double> k;
    try {
      k = parse_gains(gains);
    } catch (const std::invalid_argument& ex) {
      std::cerr << "error: " << ex.what() << '\n';
      return kUsage;
    }
    if (s < 2 || !(delta > 0.0 && delta < R) || !(E > 0.0)) {
      std::cerr << "error: need s >= 2, 0 < delta < R and E > 0\n";
      return kInvalid;
    }
    AgentMatrix X = AgentMatrix::Zero(2, s + 1);
    const auto vertices = desired_polygon(s, delta, orientation);
    for (int i = 0; i < s; ++i) X.col(i + 1) = vertices[static_cast<std::size_t>(i)];
    const AgentMatrix V = AgentMatrix::Zero(2, s + 1);
    const ProximityGraph g = build_graph(X, R);
    const SwarmView view{X, V, g};
    const MaliciousParams params{k[0], k[1], k[2], std::abs(k[0]), std::abs(k[1]), std::abs(k[2])};
    const Vec u = u_malicious(0, view, BoundedPotential(R, E), params);
    std::cout << format_number(u.norm()) << '\n';
    return kOk;
  }

  // batch
  std::error_code ec;
  if (!fs::is_directory(batch_dir, ec)) {
    std::cerr << "error: " << batch_dir << " is not a directory\n";
    return kIo;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(batch_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const fs::path root = batch_out.empty() ? fs::path(batch_dir) / "out" : fs::path(batch_out);
  std::vector<std::future<RunResult>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, run_scenario, f, root / f.stem(), std::nullopt, std::nullopt, force));
  }
  int code = kOk;
  for (auto& job : jobs) {
    const RunResult r = job.get();
    (r.code == kOk ? std::cout : std::cerr) << r.message;
    code = std::max(code, r.code);
  }
  return code;
}
