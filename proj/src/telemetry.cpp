#include "anguilla/telemetry.hpp"

#include <fmt/format.h>

namespace anguilla {

using nlohmann::json;

namespace {

json wrenches_to_json(const std::vector<LinkWrench>& ws) {
  json out = json::array();
  for (const auto& w : ws) out.push_back({w.force.x(), w.force.y(), w.torque});
  return out;
}

std::vector<LinkWrench> wrenches_from_json(const json& j) {
  std::vector<LinkWrench> out;
  for (const auto& w : j) {
    LinkWrench lw;
    lw.force = Vec2(w.at(0).get<double>(), w.at(1).get<double>());
    lw.torque = w.at(2).get<double>();
    out.push_back(lw);
  }
  return out;
}

std::vector<bool> flags_from_json(const json& j) {
  std::vector<bool> out;
  for (const auto& f : j) out.push_back(f.get<bool>());
  return out;
}

}  // namespace

json to_json(const RobotState& s) {
  json cables = json::array();
  for (const auto& c : s.cables) cables.push_back({c.left_length, c.right_length});
  return {
      {"head_pose", {{"x", s.head_pose.x}, {"y", s.head_pose.y}, {"heading", s.head_pose.heading}}},
      {"joint_angles", s.joint_angles},
      {"joint_velocities", s.joint_velocities},
      {"depth_z", s.depth_z},
      {"heave_rate", s.heave_rate},
      {"pitch", s.pitch},
      {"pitch_rate", s.pitch_rate},
      {"fills", s.fills},
      {"sim_time", s.sim_time},
      {"body_twist", {s.body_twist.vx, s.body_twist.vy, s.body_twist.omega}},
      {"cables", cables},
  };
}

RobotState robot_state_from_json(const json& j) {
  RobotState s;
  const auto& pose = j.at("head_pose");
  s.head_pose = {pose.at("x").get<double>(), pose.at("y").get<double>(),
                 pose.at("heading").get<double>()};
  s.joint_angles = j.at("joint_angles").get<std::vector<double>>();
  s.joint_velocities = j.at("joint_velocities").get<std::vector<double>>();
  s.depth_z = j.at("depth_z").get<double>();
  s.heave_rate = j.at("heave_rate").get<double>();
  s.pitch = j.at("pitch").get<double>();
  s.pitch_rate = j.at("pitch_rate").get<double>();
  s.fills = j.at("fills").get<std::vector<double>>();
  s.sim_time = j.at("sim_time").get<double>();
  const auto& tw = j.at("body_twist");
  s.body_twist = {tw.at(0).get<double>(), tw.at(1).get<double>(), tw.at(2).get<double>()};
  for (const auto& c : j.at("cables")) {
    s.cables.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  }
  return s;
}

json to_json(const Outcome& o) {
  return {{"kind", outcome_name(o.kind)}, {"time", o.time}, {"evidence", o.evidence}};
}

Outcome outcome_from_json(const json& j) {
  const auto kind = outcome_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kParse, "unknown outcome kind");
  return {*kind, j.at("time").get<double>(), j.value("evidence", std::string{})};
}

json to_json(const TelemetryRecord& r) {
  json j = {
      {"type", "telemetry"},
      {"step", r.step},
      {"sim_time", r.sim_time},
      {"state", to_json(r.state)},
      {"fluid_wrenches", wrenches_to_json(r.fluid_wrenches)},
      {"contact_wrenches", wrenches_to_json(r.contact_wrenches)},
      {"link_contact", r.link_contact},
      {"joint_torques", r.joint_torques},
      {"left_cable_taut", r.left_cable_taut},
      {"right_cable_taut", r.right_cable_taut},
  };
  j["outcome"] = r.outcome ? to_json(*r.outcome) : json(nullptr);
  return j;
}

TelemetryRecord telemetry_from_json(const json& j) {
  if (j.value("type", std::string{}) != "telemetry") {
    throw Error(ErrorCode::kParse, "not a telemetry record");
  }
  try {
    TelemetryRecord r;
    r.step = j.at("step").get<std::uint64_t>();
    r.sim_time = j.at("sim_time").get<double>();
    r.state = robot_state_from_json(j.at("state"));
    r.fluid_wrenches = wrenches_from_json(j.at("fluid_wrenches"));
    r.contact_wrenches = wrenches_from_json(j.at("contact_wrenches"));
    r.link_contact = flags_from_json(j.at("link_contact"));
    r.joint_torques = j.at("joint_torques").get<std::vector<double>>();
    r.left_cable_taut = flags_from_json(j.at("left_cable_taut"));
    r.right_cable_taut = flags_from_json(j.at("right_cable_taut"));
    if (!j.at("outcome").is_null()) r.outcome = outcome_from_json(j.at("outcome"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed telemetry record: ") + e.what());
  }
}

json telemetry_header(const std::string& scenario_name, const std::string& config_hash,
                      double dt, double duration, const json& config) {
  return {{"type", "header"},  {"format", "anguilla-telemetry"},
          {"version", 1},      {"scenario", scenario_name},
          {"config_hash", config_hash}, {"dt", dt},
          {"duration", duration}, {"config", config}};
}

std::string csv_header(int joint_count, int module_count) {
  std::string h = "step,sim_time,x,y,heading,depth_z,heave_rate,pitch,pitch_rate";
  for (int i = 0; i < joint_count; ++i) h += fmt::format(",alpha_{}", i);
  for (int i = 0; i < joint_count; ++i) h += fmt::format(",alpha_rate_{}", i);
  for (int i = 0; i < joint_count; ++i) h += fmt::format(",cable_torque_{}", i);
  for (int k = 0; k < module_count; ++k) h += fmt::format(",fill_{}", k);
  h += ",contacts,outcome";
  return h;
}

std::string csv_row(const TelemetryRecord& r) {
  const auto& s = r.state;
  std::string row = fmt::format("{},{},{},{},{},{},{},{},{}", r.step, r.sim_time,
                                s.head_pose.x, s.head_pose.y, s.head_pose.heading,
                                s.depth_z, s.heave_rate, s.pitch, s.pitch_rate);
  for (double a : s.joint_angles) row += fmt::format(",{}", a);
  for (double a : s.joint_velocities) row += fmt::format(",{}", a);
  for (double t : r.joint_torques) row += fmt::format(",{}", t);
  for (double f : s.fills) row += fmt::format(",{}", f);
  int contacts = 0;
  for (bool c : r.link_contact) contacts += c ? 1 : 0;
  row += fmt::format(",{},{}", contacts, r.outcome ? outcome_name(r.outcome->kind) : "");
  return row;
}

}  // namespace anguilla
