#pragma once

// Wire protocol for the live service: one JSON object per line.
//
// Client to server, tagged by "type":
//   {"type":"SetGait","seq":1,"gait":{...}}
//   {"type":"SetCompliance","seq":2,"G":0.5,"slack_gain_l0":0.25}
//   {"type":"SetFills","seq":3,"fills":[...]}
//   {"type":"SetFillRamp","seq":4,"target":[...],"seconds":20}
//   {"type":"Pause","seq":5}  {"type":"Resume","seq":6}
//   {"type":"Reset","seq":7,"config":{...}}   (config optional)
// Server to client: "telemetry" records, {"type":"ack","seq":n,...} and
// {"type":"error","seq":n,...}. Angles are radians, everything else SI.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "anguilla/engine.hpp"

namespace anguilla {

struct CommandMessage {
  std::optional<std::int64_t> seq;
  Command command;
};

/// Fields absent from a SetGait payload keep their value in `current_gait`.
/// Throws Error(kParse) for bad JSON, Error(kProtocol) for an unknown or
/// missing type, ValidationError for malformed fields.
CommandMessage parse_command(const nlohmann::json& j, const GaitParams& current_gait = {});
CommandMessage parse_command(const std::string& line, const GaitParams& current_gait = {});

nlohmann::json to_json(const CommandMessage& message);

nlohmann::json make_ack(std::optional<std::int64_t> seq, const std::string& command,
                        std::uint64_t step);

/// Error reply for an exception caught while handling a message.
nlohmann::json make_error(std::optional<std::int64_t> seq, const std::exception& error);
nlohmann::json make_error(std::optional<std::int64_t> seq, const std::string& code,
                          const std::string& message);

/// Best-effort seq extraction so malformed messages can still be answered.
std::optional<std::int64_t> peek_seq(const std::string& line);

}  // namespace anguilla
