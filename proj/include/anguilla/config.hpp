#pragma once

// JSON scenario files. Keys are the field names of the domain types; any
// angle may instead be given in degrees with a `_deg` suffix
// (e.g. "amplitude_A_deg": 30). `geometry` is either an inline object or a
// path to a geometry JSON file, resolved relative to the scenario file.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "anguilla/engine.hpp"

namespace anguilla {

RobotGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(const RobotGeometry& geom);

/// Keys absent from `j` keep their value from `base`.
GaitParams gait_from_json(const nlohmann::json& j, const GaitParams& base = {});
nlohmann::json gait_to_json(const GaitParams& gait);

/// Throws ValidationError (every bad or unknown key, with its path) or
/// Error(kIo) for an unreadable geometry file. Does not check physical
/// invariants; see validate_scenario.
ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});

/// Canonical form: radians, geometry inline, lattice posts as a recipe.
nlohmann::json scenario_to_json(const ScenarioConfig& config);

/// Parses JSON text. Throws Error(kParse) on malformed JSON.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::filesystem::path& base_dir = {});

ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the canonical JSON.
std::string config_hash(const ScenarioConfig& config);

std::string sha256_hex(const std::string& data);

}  // namespace anguilla
