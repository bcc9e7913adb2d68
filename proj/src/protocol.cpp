#include "anguilla/protocol.hpp"

#include <set>

#include "anguilla/config.hpp"

namespace anguilla {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  std::vector<FieldError>& errors) {
  for (const auto& [k, v] : j.items()) {
    if (k != "type" && k != "seq" && !allowed.count(k)) errors.push_back({k, "unknown key"});
  }
}

std::vector<double> number_array(const json& j, const std::string& key,
                                 std::vector<FieldError>& errors) {
  auto it = j.find(key);
  if (it == j.end()) {
    errors.push_back({key, "is required"});
    return {};
  }
  if (it->is_number()) return {it->get<double>()};
  if (!it->is_array()) {
    errors.push_back({key, "must be an array of numbers"});
    return {};
  }
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) {
      errors.push_back({key, "must be an array of numbers"});
      return {};
    }
    out.push_back(v.get<double>());
  }
  return out;
}

double number(const json& j, const std::string& key, std::vector<FieldError>& errors) {
  auto it = j.find(key);
  if (it == j.end()) {
    errors.push_back({key, "is required"});
    return 0.0;
  }
  if (!it->is_number()) {
    errors.push_back({key, "must be a number"});
    return 0.0;
  }
  return it->get<double>();
}

}  // namespace

CommandMessage parse_command(const json& j, const GaitParams& current_gait) {
  if (!j.is_object()) throw Error(ErrorCode::kProtocol, "message must be a JSON object");
  CommandMessage m;
  if (auto it = j.find("seq"); it != j.end()) {
    if (!it->is_number_integer()) throw Error(ErrorCode::kProtocol, "seq must be an integer");
    m.seq = it->get<std::int64_t>();
  }
  auto t = j.find("type");
  if (t == j.end() || !t->is_string()) {
    throw Error(ErrorCode::kProtocol, "message has no string \"type\"");
  }
  const std::string type = t->get<std::string>();
  std::vector<FieldError> errors;
  if (type == "SetGait") {
    require_keys(j, {"gait"}, errors);
    auto g = j.find("gait");
    if (g == j.end()) {
      errors.push_back({"gait", "is required"});
    } else {
      m.command = SetGait{gait_from_json(*g, current_gait)};
    }
  } else if (type == "SetCompliance") {
    require_keys(j, {"G", "slack_gain_l0"}, errors);
    SetCompliance c;
    c.G = number_array(j, "G", errors);
    if (j.contains("slack_gain_l0")) c.slack_gain_l0 = number(j, "slack_gain_l0", errors);
    m.command = c;
  } else if (type == "SetFills") {
    require_keys(j, {"fills"}, errors);
    m.command = SetFills{number_array(j, "fills", errors)};
  } else if (type == "SetFillRamp") {
    require_keys(j, {"target", "seconds"}, errors);
    SetFillRamp r;
    r.target = number_array(j, "target", errors);
    r.seconds = number(j, "seconds", errors);
    m.command = r;
  } else if (type == "Pause") {
    require_keys(j, {}, errors);
    m.command = Pause{};
  } else if (type == "Resume") {
    require_keys(j, {}, errors);
    m.command = Resume{};
  } else if (type == "Reset") {
    require_keys(j, {"config"}, errors);
    Reset r;
    if (auto c = j.find("config"); c != j.end() && !c->is_null()) {
      auto cfg = std::make_shared<ScenarioConfig>(scenario_from_json(*c));
      validate_scenario(*cfg);
      r.config = std::move(cfg);
    }
    m.command = r;
  } else {
    throw Error(ErrorCode::kProtocol, "unknown message type \"" + type + "\"");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return m;
}

CommandMessage parse_command(const std::string& line, const GaitParams& current_gait) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return parse_command(j, current_gait);
}

json to_json(const CommandMessage& message) {
  json j;
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, SetGait>) {
          j["gait"] = gait_to_json(cmd.gait);
        } else if constexpr (std::is_same_v<T, SetCompliance>) {
          j["G"] = cmd.G;
          if (cmd.slack_gain_l0) j["slack_gain_l0"] = *cmd.slack_gain_l0;
        } else if constexpr (std::is_same_v<T, SetFills>) {
          j["fills"] = cmd.fills;
        } else if constexpr (std::is_same_v<T, SetFillRamp>) {
          j["target"] = cmd.target;
          j["seconds"] = cmd.seconds;
        } else if constexpr (std::is_same_v<T, Reset>) {
          if (cmd.config) j["config"] = scenario_to_json(*cmd.config);
        }
      },
      message.command);
  j["type"] = command_name(message.command);
  if (message.seq) j["seq"] = *message.seq;
  return j;
}

json make_ack(std::optional<std::int64_t> seq, const std::string& command,
              std::uint64_t step) {
  json j{{"type", "ack"}, {"command", command}, {"step", step}};
  j["seq"] = seq ? json(*seq) : json(nullptr);
  return j;
}

json make_error(std::optional<std::int64_t> seq, const std::string& code,
                const std::string& message) {
  json j{{"type", "error"}, {"code", code}, {"message", message}};
  j["seq"] = seq ? json(*seq) : json(nullptr);
  return j;
}

json make_error(std::optional<std::int64_t> seq, const std::exception& error) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&error)) {
    json j = make_error(seq, error_code_name(v->code()), v->what());
    json fields = json::array();
    for (const auto& f : v->errors()) fields.push_back({{"field", f.field}, {"message", f.message}});
    j["fields"] = fields;
    return j;
  }
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    return make_error(seq, error_code_name(e->code()), e->what());
  }
  return make_error(seq, "internal", error.what());
}

std::optional<std::int64_t> peek_seq(const std::string& line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_object()) {
    auto it = j.find("seq");
    if (it != j.end() && it->is_number_integer()) return it->get<std::int64_t>();
  }
  return std::nullopt;
}

}  // namespace anguilla
