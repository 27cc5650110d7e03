/**
 * @file scenario_io.hpp
 * @brief Scenario files, shipped presets, CSV trajectory logs and JSON summaries
 */
#pragma once

#include "wristed/sim.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace wristed {

/// Scenario file or preset problem; the message starts with the offending field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& text);
/// Robot model from a JSON object with the keys of a scenario arm's "model" entry.
RobotModel parse_robot_model(const std::string& text);
Scenario load_scenario(const std::string& path);

struct Preset {
  std::string name;
  std::string text;
};

/// Presets compiled into the binary, sorted by name.
const std::vector<Preset>& presets();
/// Preset scenario by name; throws ScenarioError when unknown.
Scenario load_preset(const std::string& name);

/// Fixed column order of the trajectory CSV.
const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, const TrajectoryLog& log);
std::string summary_json(const RunMetrics& m);

}  // namespace wristed
