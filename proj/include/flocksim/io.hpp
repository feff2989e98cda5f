#pragma once

#include "flocksim/core.hpp"
#include "flocksim/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace flocksim {

inline constexpr const char* kSchemaVersion = "1";

/// Malformed document or schema violation.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Reads, parses and validates a scenario file. Throws IoError when the file
/// cannot be read, ScenarioError on malformed input and ValidationError when
/// `validate` is set and an assumption fails.
ScenarioConfig parse_scenario(const std::filesystem::path& path, bool validate = true);

void write_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// Fixed 12-significant-digit rendering used by every numeric output.
std::string format_number(double value);

nlohmann::json summary_to_json(const ProblemSummary& summary, const ScenarioConfig& cfg);

/// Writes trajectory.csv, metrics.csv, events.log and summary.json into `dir`
/// (created if missing). Throws IoError on failure.
void write_outputs(const SimulationRecord& record, const ScenarioConfig& cfg, const std::filesystem::path& dir);

}  // namespace flocksim
