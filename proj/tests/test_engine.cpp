#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "anguilla/config.hpp"
#include "anguilla/engine.hpp"
#include "anguilla/gait.hpp"

using namespace anguilla;

namespace {

ScenarioConfig open_water(double duration) {
  ScenarioConfig c;
  c.duration = duration;
  c.outcome.detect_stuck = false;
  return c;
}

int count_lines(const std::string& text, const std::string& needle) {
  int n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find(needle) != std::string::npos) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("zero amplitude at neutral fill is a fixed point") {
  auto c = open_water(10.0);
  c.gait.amplitude_A = 0.0;
  c.initial.head_pose = {0.2, -0.3, 0.4};
  c.initial.depth_z = 0.5;
  Simulation sim(c);
  const RobotState s0 = sim.state().robot;
  for (int k = 0; k < 1000; ++k) REQUIRE(sim.step());
  const RobotState& s = sim.state().robot;
  CHECK(s.head_pose == s0.head_pose);
  CHECK(s.joint_angles == s0.joint_angles);
  CHECK(s.depth_z == s0.depth_z);
  CHECK(s.pitch == s0.pitch);
}

TEST_CASE("step count is exact") {
  const auto c = open_water(1.0);
  CHECK(c.step_count() == 200);
  std::ostringstream log;
  const auto r = run_scenario(c, &log);
  CHECK(r.steps == 200);
  CHECK(count_lines(log.str(), "\"type\":\"telemetry\"") == 200);
  CHECK(r.outcome.kind == OutcomeKind::kTimeout);
  CHECK(r.outcome.time == doctest::Approx(1.0));

  auto odd = open_water(0.999);
  odd.dt = 0.003;
  CHECK(odd.step_count() == 333);
}

TEST_CASE("repeat runs are byte-identical") {
  auto c = load_scenario(ANGUILLA_SCENARIO_DIR "/lattice_G1.json");
  c.duration = 8.0;
  std::ostringstream a, b, ca, cb;
  run_scenario(c, &a, &ca);
  run_scenario(c, &b, &cb);
  CHECK(a.str().size() > 1000);
  CHECK(a.str() == b.str());
  CHECK(ca.str() == cb.str());
}

TEST_CASE("open-water swimming makes forward progress") {
  auto c = open_water(25.0);
  const auto r = run_scenario(c, nullptr);
  CHECK(r.outcome.kind == OutcomeKind::kTimeout);
  // The straight gait starts with the body axis turned from the head
  // heading, so judge progress by distance.
  CHECK(std::hypot(r.final_state.head_pose.x, r.final_state.head_pose.y) > 0.3);
  CHECK(r.final_state.head_pose.x > 0.0);
}

TEST_CASE("decimation thins the log") {
  const auto c = open_water(1.0);
  std::ostringstream log;
  run_scenario(c, &log, nullptr, RunOptions{5});
  CHECK(count_lines(log.str(), "\"type\":\"telemetry\"") == 40);
}

TEST_CASE("commands take effect on the next step") {
  const auto cfg = std::make_shared<const ScenarioConfig>(open_water(10.0));
  EngineState s = initial_state(cfg);
  for (int k = 0; k < 10; ++k) s = step(s).state;

  GaitParams g = s.gait;
  g.offset_phi = deg_to_rad(20);
  g.amplitude_A = deg_to_rad(10);
  const std::vector<Command> cmds{SetGait{g}};
  const auto r = step(s, cmds);
  REQUIRE(r.record);
  CHECK(r.state.gait == g);
  const auto& q = r.record->state.joint_angles;
  for (int i = 0; i < 3; ++i) {
    // Rigid cables put the joint on the template of the new gait.
    CHECK(q[i] == doctest::Approx(suggested_angle(g, i, r.record->sim_time)).epsilon(1e-6));
  }

  const std::vector<Command> comp{SetCompliance{{1.0}, 0.1}};
  const auto r2 = step(r.state, comp);
  CHECK(r2.state.compliance.G == std::vector<double>{1.0});
  CHECK(r2.state.compliance.slack_gain_l0 == 0.1);
}

TEST_CASE("pause freezes time and resume continues") {
  Simulation sim(open_water(10.0));
  for (int k = 0; k < 5; ++k) sim.step();
  const auto before = sim.state();
  sim.apply(Pause{});
  for (int k = 0; k < 5; ++k) CHECK_FALSE(sim.step());
  CHECK(sim.state().step == before.step);
  CHECK(sim.state().robot == before.robot);
  sim.apply(Resume{});
  const auto rec = sim.step();
  REQUIRE(rec);
  CHECK(rec->step == before.step + 1);
  CHECK(rec->sim_time == doctest::Approx(before.robot.sim_time + 0.005));
}

TEST_CASE("fill ramp drives a monotone descent") {
  auto c = open_water(40.0);
  c.initial.fills = {0.5, 0.5, 0.5, 0.5};
  c.initial.depth_z = 0.2;
  c.floor_depth = 5.0;
  Simulation sim(c);
  for (int k = 0; k < 200; ++k) sim.step();
  sim.apply(SetFillRamp{{1.0, 1.0, 1.0, 1.0}, 20.0});
  double prev = sim.state().robot.depth_z;
  double prev_fill = sim.state().robot.fills[0];
  while (!sim.finished()) {
    const auto rec = sim.step();
    if (!rec) break;
    CHECK(rec->state.depth_z >= prev);
    CHECK(rec->state.fills[0] >= prev_fill);
    prev = rec->state.depth_z;
    prev_fill = rec->state.fills[0];
  }
  CHECK(prev > 3.0);
  CHECK(prev_fill == doctest::Approx(1.0));
}

TEST_CASE("bad commands are rejected before they apply") {
  Simulation sim(open_water(10.0));
  CHECK_THROWS_AS(sim.apply(SetFills{{0.5, 0.5}}), ValidationError);
  CHECK_THROWS_AS(sim.apply(SetFills{{0.5, 0.5, 0.5, 1.5}}), ValidationError);
  CHECK_THROWS_AS(sim.apply(SetCompliance{{2.0}, std::nullopt}), ValidationError);
  CHECK_THROWS_AS(sim.apply(SetFillRamp{{1, 1, 1, 1}, -1.0}), ValidationError);
  GaitParams g;
  g.joint_count_N = 5;
  CHECK_THROWS_AS(sim.apply(SetGait{g}), ValidationError);
  CHECK(sim.state().compliance.G == std::vector<double>{0.0});
}

TEST_CASE("reset restores the initial state") {
  const auto cfg = std::make_shared<const ScenarioConfig>(open_water(10.0));
  Simulation sim(cfg);
  const auto init = initial_state(cfg);
  for (int k = 0; k < 50; ++k) sim.step();
  sim.apply(SetCompliance{{1.0}, std::nullopt});
  sim.apply(Reset{});
  CHECK(sim.state().step == 0);
  CHECK(sim.state().robot == init.robot);
  CHECK(sim.state().compliance == init.compliance);

  auto other = open_water(3.0);
  other.name = "other";
  sim.apply(Reset{std::make_shared<const ScenarioConfig>(other)});
  CHECK(sim.config().name == "other");
}

TEST_CASE("terminal outcome stops the run") {
  auto c = open_water(30.0);
  c.outcome.detect_stuck = true;
  c.gait.amplitude_A = 0.0;
  Simulation sim(c);
  int n = 0;
  while (!sim.finished()) {
    sim.step();
    ++n;
  }
  CHECK(sim.outcome().kind == OutcomeKind::kStuck);
  CHECK(sim.outcome().time == doctest::Approx(15.0));
  CHECK_FALSE(sim.step());
}
