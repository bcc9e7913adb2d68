#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anguilla/hydro.hpp"
#include "anguilla/model.hpp"
#include "anguilla/world.hpp"

namespace anguilla {

/// One step's snapshot. Wrench torques are about the head link centre.
struct TelemetryRecord {
  std::uint64_t step = 0;
  double sim_time = 0.0;
  RobotState state;
  std::vector<LinkWrench> fluid_wrenches;
  std::vector<LinkWrench> contact_wrenches;
  std::vector<bool> link_contact;
  /// Cable torque estimate per joint.
  std::vector<double> joint_torques;
  std::vector<bool> left_cable_taut;
  std::vector<bool> right_cable_taut;
  /// Set on the record at which a terminal outcome was reached.
  std::optional<Outcome> outcome;

  bool operator==(const TelemetryRecord&) const = default;
};

nlohmann::json to_json(const RobotState& state);
RobotState robot_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Outcome& outcome);
Outcome outcome_from_json(const nlohmann::json& j);

/// {"type": "telemetry", ...}. Numbers round-trip exactly.
nlohmann::json to_json(const TelemetryRecord& record);
TelemetryRecord telemetry_from_json(const nlohmann::json& j);

/// Header line for a telemetry log.
nlohmann::json telemetry_header(const std::string& scenario_name,
                                const std::string& config_hash, double dt,
                                double duration, const nlohmann::json& config);

/// CSV column names and one row per record.
std::string csv_header(int joint_count, int module_count);
std::string csv_row(const TelemetryRecord& record);

}  // namespace anguilla
