#pragma once

// Fixed-step simulation loop. Each step runs, in order: gait template,
// commanded cable lengths, joint intervals, contacts at the current pose,
// joint resolution under fluid and contact torques, the contact-coupled
// planar solve and pose update, heave/pitch, and outcome bookkeeping.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "anguilla/cable.hpp"
#include "anguilla/model.hpp"
#include "anguilla/telemetry.hpp"
#include "anguilla/world.hpp"

namespace anguilla {

struct FillKeyframe {
  double time = 0.0;
  std::vector<double> fills;

  bool operator==(const FillKeyframe&) const = default;
};

struct InitialConditions {
  Pose2 head_pose;
  double depth_z = 0.0;
  /// Empty means neutral fill in every module.
  std::vector<double> fills;
  /// Absent means the gait template at t = 0.
  std::optional<std::vector<double>> joint_angles;
};

struct OutcomeSettings {
  double progress_eps = 0.02;
  double stuck_window_cycles = 3.0;
  double tau_max = 1.4;
  double t_over = 2.0;
  bool detect_stuck = true;
  bool stop_on_outcome = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  RobotGeometry geometry;
  GaitParams gait;
  ComplianceParams compliance;
  ContactParams contact;
  InitialConditions initial;
  /// Piecewise-linear fills over time; held constant outside the keyframes.
  std::vector<FillKeyframe> fill_schedule;
  ObstacleField obstacles;
  std::optional<double> floor_depth;
  double duration = 10.0;
  double dt = 0.005;
  OutcomeSettings outcome;
  /// Reserved; the engine uses no randomness.
  std::uint64_t seed = 0;

  int step_count() const;
  OutcomeCriteria outcome_criteria() const;
};

std::vector<FieldError> check_scenario(const ScenarioConfig& config);
/// Throws ValidationError listing every violation.
void validate_scenario(const ScenarioConfig& config);

struct SetGait {
  GaitParams gait;
};
struct SetCompliance {
  std::vector<double> G;
  std::optional<double> slack_gain_l0;
};
struct SetFills {
  std::vector<double> fills;
};
struct SetFillRamp {
  std::vector<double> target;
  double seconds = 0.0;
};
struct Pause {};
struct Resume {};
struct Reset {
  /// Absent means restart the current scenario.
  std::shared_ptr<const ScenarioConfig> config;
};

using Command =
    std::variant<SetGait, SetCompliance, SetFills, SetFillRamp, Pause, Resume, Reset>;

const char* command_name(const Command& command);

/// How fills evolve: the scenario schedule until a fill command overrides
/// it, then a linear ramp from `start` to `target` over [t0, t1].
struct FillControl {
  bool scripted = true;
  std::vector<double> start;
  std::vector<double> target;
  double t0 = 0.0;
  double t1 = 0.0;
};

struct EngineState {
  std::shared_ptr<const ScenarioConfig> config;
  RobotState robot;
  GaitParams gait;
  ComplianceParams compliance;
  FillControl fill_control;
  std::uint64_t step = 0;
  bool paused = false;
  std::optional<Outcome> outcome;
  OutcomeTracker tracker{OutcomeCriteria{}};
};

EngineState initial_state(std::shared_ptr<const ScenarioConfig> config);

/// Fill fractions the controller demands at time t.
std::vector<double> fills_at(const EngineState& state, double t);

/// Throws ValidationError when the payload is malformed for this state.
void validate_command(const Command& command, const EngineState& state);

/// Validates then applies a command. Reset replaces the whole state.
EngineState apply_command(EngineState state, const Command& command);

struct StepResult {
  EngineState state;
  /// Absent while paused or after a terminal outcome.
  std::optional<TelemetryRecord> record;
};

/// Applies `commands` at the step boundary, then advances one dt. Identical
/// inputs give bit-identical results. Throws Error(kDiverged) on
/// non-finite state.
StepResult step(EngineState state, std::span<const Command> commands = {});

/// Mutable convenience wrapper around step().
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);
  explicit Simulation(std::shared_ptr<const ScenarioConfig> config);

  /// Validates and applies immediately (between steps).
  void apply(const Command& command);
  std::optional<TelemetryRecord> step();

  const EngineState& state() const { return state_; }
  const ScenarioConfig& config() const { return *state_.config; }
  bool finished() const;
  Outcome outcome() const;

 private:
  EngineState state_;
};

struct RunOptions {
  /// Write every n-th record to the log; 1 keeps every step.
  int decimation = 1;
};

struct RunResult {
  Outcome outcome;
  std::uint64_t steps = 0;
  RobotState final_state;
  std::string config_hash;
};

/// Runs the scenario to completion, streaming a header line, one JSON
/// telemetry line per step and a final outcome line to `log`, and CSV rows
/// to `csv` when given. On divergence the log ends with an error line and
/// Error(kDiverged) propagates.
RunResult run_scenario(const ScenarioConfig& config, std::ostream* log,
                       std::ostream* csv = nullptr, const RunOptions& options = {});

}  // namespace anguilla
