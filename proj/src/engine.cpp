#include "anguilla/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "anguilla/buoyancy.hpp"
#include "anguilla/config.hpp"
#include "anguilla/gait.hpp"
#include "anguilla/hydro.hpp"

namespace anguilla {

namespace {

constexpr int kFeasibilitySamples = 64;

std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b,
                         double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - a[i]);
  return out;
}

std::vector<double> schedule_at(const std::vector<FillKeyframe>& keys, double t) {
  if (t <= keys.front().time) return keys.front().fills;
  if (t >= keys.back().time) return keys.back().fills;
  const auto it = std::upper_bound(keys.begin(), keys.end(), t,
                                   [](double v, const FillKeyframe& k) { return v < k.time; });
  const FillKeyframe& hi = *it;
  const FillKeyframe& lo = *(it - 1);
  return lerp(lo.fills, hi.fills, (t - lo.time) / (hi.time - lo.time));
}

void check_fill_vector(std::vector<FieldError>& errors, const std::string& field,
                       const std::vector<double>& fills, int module_count) {
  if (static_cast<int>(fills.size()) != module_count) {
    errors.push_back({field, "must hold one fill per module (" +
                                 std::to_string(module_count) + ")"});
  }
  for (double f : fills) {
    if (!(f >= 0.0 && f <= 1.0)) {
      errors.push_back({field, "fills must lie in [0, 1]"});
      break;
    }
  }
}

void prefix(std::vector<FieldError>& into, const std::vector<FieldError>& from,
            const std::string& p) {
  for (const auto& e : from) into.push_back({p + e.field, e.message});
}

/// Samples one gait period and reports the first phase at which the
/// compliance policy asks for an infeasible cable pair.
void check_cable_feasibility(std::vector<FieldError>& errors, const GaitParams& gait,
                             const ComplianceParams& compliance,
                             const RobotGeometry& geom, const std::string& field) {
  for (int k = 0; k < kFeasibilitySamples; ++k) {
    const double t = gait.period() * k / kFeasibilitySamples;
    for (int i = 0; i < gait.joint_count_N; ++i) {
      try {
        const double a = suggested_angle(gait, i, t);
        angle_interval_from_cables(commanded_cable_lengths(a, i, compliance, gait, geom), geom);
      } catch (const Error& e) {
        errors.push_back({field, std::string("gait and compliance give infeasible cables (") +
                                     e.what() + "); raise slack_gain_l0"});
        return;
      }
    }
  }
}

std::vector<FieldError> check_gait_for(const GaitParams& gait, const RobotGeometry& geom) {
  std::vector<FieldError> errors = check_gait(gait);
  if (gait.joint_count_N != geom.joint_count()) {
    errors.push_back({"joint_count_N", "must equal module_count - 1 (" +
                                           std::to_string(geom.joint_count()) + ")"});
  }
  if (errors.empty() && !(gait.amplitude_A + std::abs(gait.offset_phi) <= geom.joint_limit)) {
    errors.push_back({"amplitude_A", "amplitude plus |offset_phi| exceeds joint_limit"});
  }
  return errors;
}

void throw_if(std::vector<FieldError> errors) {
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

}  // namespace

int ScenarioConfig::step_count() const {
  return static_cast<int>(std::llround(duration / dt));
}

OutcomeCriteria ScenarioConfig::outcome_criteria() const {
  OutcomeCriteria c;
  c.progress_eps = outcome.progress_eps;
  c.stuck_window = outcome.stuck_window_cycles * gait.period();
  c.tau_max = outcome.tau_max;
  c.t_over = outcome.t_over;
  c.detect_stuck = outcome.detect_stuck;
  if (obstacles.bounds) c.far_x = obstacles.bounds->x_max;
  c.duration = duration;
  return c;
}

std::vector<FieldError> check_scenario(const ScenarioConfig& c) {
  std::vector<FieldError> errors;
  const auto geom_errors = check_geometry(c.geometry);
  prefix(errors, geom_errors, "geometry.");
  const auto gait_errors = check_gait_for(c.gait, c.geometry);
  prefix(errors, gait_errors, "gait.");
  const auto comp_errors = check_compliance(c.compliance, c.geometry.joint_count());
  prefix(errors, comp_errors, "compliance.");
  prefix(errors, check_contact(c.contact), "");
  prefix(errors, check_field(c.obstacles), "");

  if (!(std::isfinite(c.duration) && c.duration > 0.0)) {
    errors.push_back({"duration", "must be > 0"});
  }
  if (!(c.dt > 0.0 && c.dt <= 0.02)) errors.push_back({"dt", "must lie in (0, 0.02]"});
  if (!(c.initial.depth_z >= 0.0)) errors.push_back({"initial.depth_z", "must be >= 0"});
  if (c.floor_depth && !(*c.floor_depth > 0.0)) {
    errors.push_back({"floor_depth", "must be > 0"});
  }
  if (c.floor_depth && c.initial.depth_z > *c.floor_depth) {
    errors.push_back({"initial.depth_z", "must not exceed floor_depth"});
  }
  const int modules = c.geometry.module_count;
  if (!c.initial.fills.empty()) {
    check_fill_vector(errors, "initial.fills", c.initial.fills, modules);
  }
  if (c.initial.joint_angles) {
    const auto& q = *c.initial.joint_angles;
    if (static_cast<int>(q.size()) != c.geometry.joint_count()) {
      errors.push_back({"initial.joint_angles", "must hold one angle per joint"});
    }
    for (double a : q) {
      if (!(std::abs(a) <= c.geometry.joint_limit)) {
        errors.push_back({"initial.joint_angles", "angles must lie within joint_limit"});
        break;
      }
    }
  }
  for (std::size_t k = 0; k < c.fill_schedule.size(); ++k) {
    const std::string f = "fill_schedule[" + std::to_string(k) + "]";
    check_fill_vector(errors, f + ".fills", c.fill_schedule[k].fills, modules);
    if (!(c.fill_schedule[k].time >= 0.0)) errors.push_back({f + ".t", "must be >= 0"});
    if (k > 0 && !(c.fill_schedule[k].time > c.fill_schedule[k - 1].time)) {
      errors.push_back({f + ".t", "keyframe times must increase strictly"});
    }
  }
  const auto& o = c.outcome;
  if (!(o.progress_eps >= 0.0)) errors.push_back({"outcome.progress_eps", "must be >= 0"});
  if (!(o.stuck_window_cycles > 0.0)) {
    errors.push_back({"outcome.stuck_window_cycles", "must be > 0"});
  }
  if (!(o.tau_max > 0.0)) errors.push_back({"outcome.tau_max", "must be > 0"});
  if (!(o.t_over >= 0.0)) errors.push_back({"outcome.t_over", "must be >= 0"});

  if (geom_errors.empty() && gait_errors.empty() && comp_errors.empty()) {
    check_cable_feasibility(errors, c.gait, c.compliance, c.geometry,
                            "compliance.slack_gain_l0");
  }
  return errors;
}

void validate_scenario(const ScenarioConfig& config) { throw_if(check_scenario(config)); }

const char* command_name(const Command& command) {
  struct Namer {
    const char* operator()(const SetGait&) const { return "SetGait"; }
    const char* operator()(const SetCompliance&) const { return "SetCompliance"; }
    const char* operator()(const SetFills&) const { return "SetFills"; }
    const char* operator()(const SetFillRamp&) const { return "SetFillRamp"; }
    const char* operator()(const Pause&) const { return "Pause"; }
    const char* operator()(const Resume&) const { return "Resume"; }
    const char* operator()(const Reset&) const { return "Reset"; }
  };
  return std::visit(Namer{}, command);
}

EngineState initial_state(std::shared_ptr<const ScenarioConfig> config) {
  if (!config) throw Error(ErrorCode::kInvalidArgument, "scenario config is null");
  const ScenarioConfig& c = *config;
  const RobotGeometry& g = c.geometry;

  std::vector<double> fills = c.initial.fills;
  if (fills.empty()) {
    fills = c.fill_schedule.empty()
                ? std::vector<double>(static_cast<std::size_t>(g.module_count), g.neutral_fill)
                : schedule_at(c.fill_schedule, 0.0);
  }
  std::vector<double> angles =
      c.initial.joint_angles ? *c.initial.joint_angles : suggested_profile(c.gait, 0.0);

  EngineState s;
  s.robot = make_state(g, c.initial.head_pose, angles, c.initial.depth_z, fills);
  s.robot.pitch = pitch_equilibrium(s.robot.fills, g);
  for (int i = 0; i < g.joint_count(); ++i) {
    s.robot.cables[static_cast<std::size_t>(i)] = commanded_cable_lengths(
        suggested_angle(c.gait, i, 0.0), i, c.compliance, c.gait, g);
  }
  s.gait = c.gait;
  s.compliance = c.compliance;
  s.fill_control = {true, fills, fills, 0.0, 0.0};
  s.tracker = OutcomeTracker(c.outcome_criteria());
  s.tracker.start(0.0, s.robot.head_pose.x);
  s.config = std::move(config);
  return s;
}

std::vector<double> fills_at(const EngineState& s, double t) {
  const FillControl& f = s.fill_control;
  if (f.scripted) {
    if (s.config->fill_schedule.empty()) return f.start;
    return schedule_at(s.config->fill_schedule, t);
  }
  if (t >= f.t1) return f.target;
  if (t <= f.t0) return f.start;
  return lerp(f.start, f.target, (t - f.t0) / (f.t1 - f.t0));
}

void validate_command(const Command& command, const EngineState& s) {
  const RobotGeometry& g = s.config->geometry;
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        std::vector<FieldError> errors;
        if constexpr (std::is_same_v<T, SetGait>) {
          prefix(errors, check_gait_for(cmd.gait, g), "gait.");
          if (errors.empty()) {
            check_cable_feasibility(errors, cmd.gait, s.compliance, g, "gait");
          }
        } else if constexpr (std::is_same_v<T, SetCompliance>) {
          ComplianceParams next = s.compliance;
          next.G = cmd.G;
          if (cmd.slack_gain_l0) next.slack_gain_l0 = *cmd.slack_gain_l0;
          prefix(errors, check_compliance(next, g.joint_count()), "");
          if (errors.empty()) {
            check_cable_feasibility(errors, s.gait, next, g, "slack_gain_l0");
          }
        } else if constexpr (std::is_same_v<T, SetFills>) {
          check_fill_vector(errors, "fills", cmd.fills, g.module_count);
        } else if constexpr (std::is_same_v<T, SetFillRamp>) {
          check_fill_vector(errors, "target", cmd.target, g.module_count);
          if (!(cmd.seconds >= 0.0 && std::isfinite(cmd.seconds))) {
            errors.push_back({"seconds", "must be >= 0"});
          }
        } else if constexpr (std::is_same_v<T, Reset>) {
          if (cmd.config) errors = check_scenario(*cmd.config);
        }
        throw_if(std::move(errors));
      },
      command);
}

EngineState apply_command(EngineState s, const Command& command) {
  validate_command(command, s);
  const double now = s.robot.sim_time;
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, SetGait>) {
          s.gait = cmd.gait;
        } else if constexpr (std::is_same_v<T, SetCompliance>) {
          s.compliance.G = cmd.G;
          if (cmd.slack_gain_l0) s.compliance.slack_gain_l0 = *cmd.slack_gain_l0;
        } else if constexpr (std::is_same_v<T, SetFills>) {
          s.fill_control = {false, cmd.fills, cmd.fills, now, now};
        } else if constexpr (std::is_same_v<T, SetFillRamp>) {
          s.fill_control = {false, s.robot.fills, cmd.target, now, now + cmd.seconds};
        } else if constexpr (std::is_same_v<T, Pause>) {
          s.paused = true;
        } else if constexpr (std::is_same_v<T, Resume>) {
          s.paused = false;
        } else if constexpr (std::is_same_v<T, Reset>) {
          s = initial_state(cmd.config ? cmd.config : s.config);
        }
      },
      command);
  return s;
}

StepResult step(EngineState s, std::span<const Command> commands) {
  for (const auto& c : commands) s = apply_command(std::move(s), c);
  const ScenarioConfig& cfg = *s.config;
  const bool halted = s.outcome && cfg.outcome.stop_on_outcome;
  if (s.paused || halted || s.step >= static_cast<std::uint64_t>(cfg.step_count())) {
    return {std::move(s), std::nullopt};
  }

  const RobotGeometry& g = cfg.geometry;
  const double dt = cfg.dt;
  const int n = g.joint_count();
  const auto nn = static_cast<std::size_t>(n);
  const double t_next = static_cast<double>(s.step + 1) * dt;
  const RobotState& prev = s.robot;

  // Template, cables and admissible intervals for the coming step.
  const auto profile = suggested_profile(s.gait, t_next);
  std::vector<CablePair> cables(nn);
  std::vector<AngleInterval> intervals(nn);
  for (int i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    cables[ii] = commanded_cable_lengths(profile[ii], i, s.compliance, s.gait, g);
    intervals[ii] = angle_interval_from_cables(cables[ii], g);
  }

  // Joint resolution under loads evaluated at the current pose.
  const ChainPose chain = forward_kinematics(prev.head_pose, prev.joint_angles, g);
  const auto contacts_now = find_contacts(chain, cfg.obstacles, g, prev.depth_z);
  std::vector<double> angles(nn), rates(nn), cable_torque(nn);
  std::vector<bool> left_taut(nn), right_taut(nn);
  for (int i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto contact = joint_contact_load(chain, contacts_now, i, cfg.contact);
    const double tau = distal_drag_torque(chain, i, prev.body_twist, prev.joint_velocities, g) +
                       contact.torque;
    const JointMotion m = resolve_joint_angle(intervals[ii], prev.joint_angles[ii],
                                              prev.joint_velocities[ii], tau, dt, g,
                                              contact.load);
    angles[ii] = m.alpha;
    rates[ii] = m.alpha_rate;
    cable_torque[ii] = m.cable_torque;
    left_taut[ii] = m.upper_bound_active;
    right_taut[ii] = m.lower_bound_active;
  }

  // Planar body velocity for the new shape, contacts coupled implicitly.
  const ChainPose shaped = forward_kinematics(prev.head_pose, angles, g);
  auto contacts = find_contacts(shaped, cfg.obstacles, g, prev.depth_z);
  const Twist2 twist =
      solve_body_velocity_in_contact(shaped, rates, contacts, cfg.contact, dt, g);
  RobotState next = advance_planar(prev, angles, rates, twist, dt);
  next.sim_time = t_next;
  next.cables = cables;

  // Vertical channel.
  next.fills = fills_at(s, t_next);
  const VerticalState v = step_vertical({prev.depth_z, prev.heave_rate, prev.pitch, prev.pitch_rate},
                                        next.fills, dt, g, cfg.floor_depth);
  next.depth_z = v.depth_z;
  next.heave_rate = v.heave_rate;
  next.pitch = v.pitch;
  next.pitch_rate = v.pitch_rate;

  TelemetryRecord rec;
  rec.step = s.step + 1;
  rec.sim_time = t_next;
  rec.fluid_wrenches = chain_drag(shaped, twist, rates, g);
  const ContactForces cf = contact_forces(shaped, std::move(contacts), cfg.contact, twist, rates);
  rec.contact_wrenches = cf.link_wrenches;
  rec.link_contact = cf.link_in_contact;
  rec.joint_torques = cable_torque;
  rec.left_cable_taut = left_taut;
  rec.right_cable_taut = right_taut;

  if (!s.outcome) {
    if (auto o = s.tracker.update({t_next, next.head_pose.x, cable_torque})) {
      s.outcome = o;
      rec.outcome = o;
    } else if (rec.step >= static_cast<std::uint64_t>(cfg.step_count())) {
      s.outcome = s.tracker.timeout(t_next);
      rec.outcome = s.outcome;
    }
  }

  s.robot = std::move(next);
  s.step += 1;
  rec.state = s.robot;
  return {std::move(s), std::move(rec)};
}

Simulation::Simulation(ScenarioConfig config)
    : Simulation(std::make_shared<const ScenarioConfig>(std::move(config))) {}

Simulation::Simulation(std::shared_ptr<const ScenarioConfig> config) {
  validate_scenario(*config);
  state_ = initial_state(std::move(config));
}

void Simulation::apply(const Command& command) {
  state_ = apply_command(state_, command);
}

std::optional<TelemetryRecord> Simulation::step() {
  StepResult r = anguilla::step(state_);
  state_ = std::move(r.state);
  return std::move(r.record);
}

bool Simulation::finished() const {
  const auto& c = *state_.config;
  return (state_.outcome && c.outcome.stop_on_outcome) ||
         state_.step >= static_cast<std::uint64_t>(c.step_count());
}

Outcome Simulation::outcome() const {
  if (state_.outcome) return *state_.outcome;
  return state_.tracker.timeout(state_.robot.sim_time);
}

RunResult run_scenario(const ScenarioConfig& config, std::ostream* log, std::ostream* csv,
                       const RunOptions& options) {
  validate_scenario(config);
  const int decimation = std::max(1, options.decimation);
  const nlohmann::json config_json = scenario_to_json(config);
  RunResult result;
  result.config_hash = config_hash(config);

  if (log) {
    *log << telemetry_header(config.name, result.config_hash, config.dt, config.duration,
                             config_json)
                .dump()
         << '\n';
  }
  if (csv) *csv << csv_header(config.geometry.joint_count(), config.geometry.module_count) << '\n';

  Simulation sim(config);
  try {
    while (!sim.finished()) {
      auto rec = sim.step();
      if (!rec) break;
      const bool keep = rec->step % static_cast<std::uint64_t>(decimation) == 0 ||
                        rec->outcome.has_value();
      if (keep) {
        if (log) *log << to_json(*rec).dump() << '\n';
        if (csv) *csv << csv_row(*rec) << '\n';
      }
      if (log && rec->step % 1000 == 0) log->flush();
    }
  } catch (const Error& e) {
    if (log) {
      *log << nlohmann::json{{"type", "error"},
                             {"code", error_code_name(e.code())},
                             {"message", e.what()},
                             {"sim_time", sim.state().robot.sim_time},
                             {"step", sim.state().step}}
                  .dump()
           << '\n';
      log->flush();
    }
    throw;
  }

  result.outcome = sim.outcome();
  result.steps = sim.state().step;
  result.final_state = sim.state().robot;
  if (log) {
    nlohmann::json o = to_json(result.outcome);
    o["type"] = "outcome";
    o["steps"] = result.steps;
    *log << o.dump() << '\n';
    log->flush();
  }
  return result;
}

}  // namespace anguilla
