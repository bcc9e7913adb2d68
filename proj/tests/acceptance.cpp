// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail N]...
//
// Exit status is 0 when every criterion passes, or fails only where listed
// with --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "anguilla/analysis.hpp"
#include "anguilla/buoyancy.hpp"
#include "anguilla/cable.hpp"
#include "anguilla/config.hpp"
#include "anguilla/engine.hpp"
#include "anguilla/gait.hpp"
#include "anguilla/hydro.hpp"

using namespace anguilla;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScenarioConfig scenario(const std::string& name) {
  return load_scenario(std::string(ANGUILLA_SCENARIO_DIR) + "/" + name + ".json");
}

struct Frame {
  double time;
  Vec2 centroid;
  Vec2 head_tip;
  Vec2 tail_tip;
  std::vector<Vec2> points;
};

// Body outline per step, from the head pose and joint angles alone.
std::vector<Frame> trace(const ScenarioConfig& c) {
  Simulation sim(c);
  std::vector<Frame> out;
  auto add = [&](const RobotState& s) {
    const auto ch = forward_kinematics(s.head_pose, s.joint_angles, c.geometry);
    Frame f;
    f.time = s.sim_time;
    f.centroid = Vec2::Zero();
    for (const auto& l : ch.links) f.centroid += l.center / static_cast<double>(ch.links.size());
    f.head_tip = ch.front(0);
    f.tail_tip = ch.back(static_cast<int>(ch.links.size()) - 1);
    f.points.push_back(f.head_tip);
    for (const auto& p : ch.pivots) f.points.push_back(p);
    f.points.push_back(f.tail_tip);
    out.push_back(std::move(f));
  };
  add(sim.state().robot);
  while (!sim.finished()) {
    const auto r = sim.step();
    if (!r) break;
    add(r->state);
  }
  return out;
}

const Frame& at_time(const std::vector<Frame>& frames, double t) {
  auto it = std::min_element(frames.begin(), frames.end(), [&](const Frame& a, const Frame& b) {
    return std::abs(a.time - t) < std::abs(b.time - t);
  });
  return *it;
}

double axis_heading(const Frame& f) {
  const Vec2 d = f.head_tip - f.tail_tip;
  return std::atan2(d.y(), d.x());
}

double wrap(double a) { return std::remainder(a, 2 * kPi); }

GaitParams straight_gait() {
  GaitParams g;
  g.amplitude_A = deg_to_rad(30);
  g.spatial_freq_xi = 0.5;
  g.temporal_freq_omega = 0.2;
  g.offset_phi = 0.0;
  return g;
}

Verdict straight_swimming() {
  const auto t0 = Clock::now();
  const RobotGeometry base = scenario("straight_openwater").geometry;
  const auto cal = calibrate_drag(base, straight_gait(), 0.305, 10.0);
  const double t_cal = seconds_since(t0);

  // Independent run: one start-up cycle, then ten measured cycles.
  ScenarioConfig c;
  c.geometry = base;
  c.geometry.drag_tangent_Ct = cal.drag_tangent_Ct;
  c.gait = straight_gait();
  c.compliance.G = {0.0};
  c.outcome.detect_stuck = false;
  const double T = c.gait.period();
  c.duration = 11 * T;
  const auto t1 = Clock::now();
  const auto frames = trace(c);
  const double t_run = seconds_since(t1);

  // Forward axis: mean body-axis direction over the first measured cycle.
  Vec2 axis = Vec2::Zero();
  for (const auto& f : frames) {
    if (f.time >= T && f.time < 2 * T) axis += (f.head_tip - f.tail_tip).normalized();
  }
  axis.normalize();
  const Vec2 d = at_time(frames, 11 * T).centroid - at_time(frames, T).centroid;
  const double forward = d.dot(axis);
  const double lateral = std::abs(cross2(axis, d));
  const double blpc = forward / c.geometry.body_length / 10.0;
  const double total = t_cal + t_run;

  Verdict v;
  v.pass = std::abs(blpc - 0.305) <= 0.15 * 0.305 && lateral < 0.1 * forward && total < 10.0;
  v.detail = fmt::format(
      "{:.4f} BL/cycle (target 0.305 +-15%), lateral drift {:.2f}% of {:.3f} m forward; "
      "calibrated Ct {:.4f} at Cn {:.2f} (Cn/Ct {:.2f}) in {} evaluations; "
      "calibration {:.2f} s + run {:.2f} s",
      blpc, 100 * lateral / forward, forward, cal.drag_tangent_Ct, cal.drag_normal_Cn,
      cal.drag_normal_Cn / cal.drag_tangent_Ct, cal.evaluations, t_cal, t_run);
  return v;
}

Verdict turning() {
  auto c = scenario("turning");
  const double T = c.gait.period();
  const double phi = c.gait.offset_phi;
  const auto frames = trace(c);
  const int cycles = static_cast<int>(std::floor(frames.back().time / T + 1e-9)) - 1;
  double total = 0.0;
  double prev = axis_heading(at_time(frames, T));
  for (int k = 2; k <= cycles + 1; ++k) {
    const double h = axis_heading(at_time(frames, k * T));
    total += wrap(h - prev);
    prev = h;
  }
  const double per_cycle = rad_to_deg(total / cycles);

  // A positive offset bends each joint counter-clockwise going tailward, so
  // the body arcs clockwise and the swimmer turns clockwise.
  const bool toward_offset = per_cycle * phi < 0.0;

  std::vector<Vec2> pts;
  for (const auto& f : frames) {
    if (f.time >= T) pts.insert(pts.end(), f.points.begin(), f.points.end());
  }
  const double radius = enclosing_circle(pts).radius;
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p / static_cast<double>(pts.size());
  double bound = 0.0;
  for (const auto& p : pts) bound = std::max(bound, (p - mean).norm());

  Verdict v;
  const double mag = std::abs(per_cycle);
  v.pass = toward_offset && mag >= 15.0 && mag <= 50.0 && radius < 1.0 && radius <= bound + 1e-12;
  v.detail = fmt::format(
      "phi {:+.1f} deg gives {:+.2f} deg/cycle over {} cycles ({}), |rate| in [15, 50]; "
      "sweep radius {:.3f} m (< 1.0, centroid bound {:.3f} m)",
      rad_to_deg(phi), per_cycle, cycles, toward_offset ? "toward offset side" : "WRONG SIDE",
      radius, bound);
  return v;
}

Verdict descent() {
  auto c = scenario("descent");
  Simulation sim(c);
  double onset = -1.0, reached = -1.0, prev = sim.state().robot.depth_z;
  bool monotone = true;
  while (!sim.finished()) {
    const auto r = sim.step();
    if (!r) break;
    const double z = r->state.depth_z;
    if (onset < 0.0 && z > 1e-9) onset = r->sim_time;
    if (onset >= 0.0 && z < prev) monotone = false;
    if (reached < 0.0 && z >= 1.52) reached = r->sim_time;
    prev = z;
  }

  // Constant ballast from rest against the closed-form terminal speed.
  const RobotGeometry g = c.geometry;
  const std::vector<double> full(static_cast<std::size_t>(g.module_count), 1.0);
  const double dm = g.module_count * 0.5 * g.syringes_per_module * g.syringe_volume * 1000.0;
  const double vt = std::sqrt(dm * 9.81 / g.heave_drag_cz);
  VerticalState s;
  for (int k = 0; k < 2000; ++k) s = step_vertical(s, full, 0.005, g);
  const double err = std::abs(s.heave_rate - vt) / vt;

  Verdict v;
  v.pass = onset >= 0.0 && monotone && reached >= 0.0 && reached < 60.0 && err < 0.01 &&
           std::abs(net_ballast_mass(full, g) - dm) < 1e-12;
  v.detail = fmt::format(
      "descent onset {:.2f} s, {} after onset, 1.52 m reached at {} (limit 60 s), final depth "
      "{:.3f} m; terminal speed {:.4f} m/s vs sqrt(dm g/cz) = {:.4f} m/s ({:.3f}% error, "
      "dm {:.3f} kg)",
      onset, monotone ? "monotone" : "NOT monotone",
      reached >= 0 ? fmt::format("{:.2f} s", reached) : std::string("never"), prev,
      s.heave_rate, vt, 100 * err, dm);
  return v;
}

Verdict lattice() {
  const char* names[] = {"lattice_G0", "lattice_G05", "lattice_G1"};
  const double gs[] = {0.0, 0.5, 1.0};
  bool pass = true;
  std::string detail;
  for (double scale : {0.5, 1.0, 2.0}) {
    detail += fmt::format("k_c x{}:", scale);
    for (int i = 0; i < 3; ++i) {
      auto c = scenario(names[i]);
      c.contact.stiffness_kc *= scale;
      const auto r = run_scenario(c, nullptr);
      const auto k = r.outcome.kind;
      const bool ok = gs[i] == 0.0 ? (k == OutcomeKind::kStuck || k == OutcomeKind::kOverload)
                                   : k == OutcomeKind::kSuccess;
      pass = pass && ok;
      detail += fmt::format(" G={} {} {:.1f}s{}", gs[i], outcome_name(k), r.outcome.time,
                            ok ? "" : " (x)");
    }
    detail += scale < 2.0 ? "; " : "";
  }
  return {pass, detail};
}

Verdict properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };
  const RobotGeometry g;

  const double w = cable_working_limit(g);
  double worst = 0.0;
  bool monotone = true;
  CablePair prev = exact_cable_lengths(-w, g);
  for (int k = 0; k <= 4000; ++k) {
    const double a = std::min(w, -w + k * (2 * w / 4000));
    const auto pair = exact_cable_lengths(a, g);
    if (k > 0 && k < 4000) {
      // At the end points a cable spans its full reach and no longer binds.
      const auto iv = angle_interval_from_cables(pair, g);
      worst = std::max({worst, std::abs(iv.lo - a), std::abs(iv.hi - a)});
    }
    if (k > 0 && !(pair.left_length > prev.left_length && pair.right_length < prev.right_length)) {
      monotone = false;
    }
    prev = pair;
  }
  check(worst <= 1e-9, "round-trip inversion");
  check(monotone, "cable monotonicity");

  bool nested = true;
  for (double phi : {0.0, deg_to_rad(20)}) {
    GaitParams p;
    p.amplitude_A = deg_to_rad(50);
    p.offset_phi = phi;
    p.spatial_freq_xi = 0.6;
    p.temporal_freq_omega = 0.1;
    if (phi != 0.0) p.amplitude_A = deg_to_rad(30);
    for (int k = 0; k < 300; ++k) {
      const double a = suggested_angle(p, k % 3, 0.11 * k);
      const auto i0 = angle_interval_from_cables(commanded_cable_lengths(a, 0.0, p, 0.25, g), g);
      const auto i5 = angle_interval_from_cables(commanded_cable_lengths(a, 0.5, p, 0.25, g), g);
      const auto i1 = angle_interval_from_cables(commanded_cable_lengths(a, 1.0, p, 0.25, g), g);
      nested = nested && i5.contains(i0, 1e-9) && i1.contains(i5, 1e-9);
    }
  }
  check(nested, "compliance nesting");

  bool serp = true;
  {
    GaitParams p = straight_gait();
    const double lag_t = joint_phase_lag(p) / (2 * kPi * p.temporal_freq_omega);
    for (int k = 0; k < 500; ++k) {
      const double t = 0.013 * k;
      for (int i = 0; i < 3; ++i) {
        const double a = suggested_angle(p, i, t);
        serp = serp && std::abs(a) <= p.amplitude_A + 1e-12 &&
               std::abs(suggested_angle(p, i, t + p.period()) - a) < 1e-9;
      }
      serp = serp && std::abs(suggested_angle(p, 1, t + lag_t) - suggested_angle(p, 0, t)) < 1e-9;
    }
  }
  check(serp, "serpenoid boundedness/periodicity/phase lag");

  bool dissipative = true, invariant = true;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> q{u(rng), u(rng), u(rng)};
    const std::vector<double> qd{2 * u(rng), 2 * u(rng), 2 * u(rng)};
    const Twist2 head{u(rng), u(rng), u(rng)};
    const auto ch = forward_kinematics({u(rng), u(rng), 3 * u(rng)}, q, g);
    const auto tw = link_twists(ch, head, qd);
    double power = 0.0;
    for (std::size_t i = 0; i < ch.links.size(); ++i) {
      const auto w = link_drag(ch.links[i], tw[i], g);
      power += w.force.dot(Vec2(tw[i].vx, tw[i].vy)) + w.torque * tw[i].omega;
    }
    dissipative = dissipative && power <= 0.0;
    const double rot = 3 * u(rng);
    const auto a = solve_body_velocity(forward_kinematics({}, q, g), qd, {}, g);
    const auto b = solve_body_velocity(forward_kinematics({u(rng), u(rng), rot}, q, g), qd, {}, g);
    const double ex = std::cos(rot) * a.vx - std::sin(rot) * a.vy;
    const double ey = std::sin(rot) * a.vx + std::cos(rot) * a.vy;
    invariant = invariant && std::abs(b.vx - ex) < 1e-10 && std::abs(b.vy - ey) < 1e-10 &&
                std::abs(b.omega - a.omega) < 1e-10;
  }
  check(dissipative, "drag dissipativity");
  check(invariant, "frame invariance");

  bool anti = true;
  std::uniform_real_distribution<double> f01(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> f(4), m(4);
    for (int i = 0; i < 4; ++i) {
      f[i] = f01(rng);
      m[i] = 1.0 - f[i];
    }
    anti = anti && std::abs(net_ballast_mass(f, g) + net_ballast_mass(m, g)) < 1e-12;
  }
  check(anti, "ballast antisymmetry");

  auto c = scenario("lattice_G05");
  c.duration = 20.0;
  std::ostringstream a, b;
  run_scenario(c, &a);
  run_scenario(c, &b);
  check(a.str() == b.str() && !a.str().empty(), "determinism");

  ScenarioConfig one;
  one.duration = 1.0;
  one.dt = 0.005;
  one.outcome.detect_stuck = false;
  std::ostringstream log;
  const auto r = run_scenario(one, &log);
  int records = 0;
  std::istringstream in(log.str());
  for (std::string line; std::getline(in, line);) {
    records += line.find("\"type\":\"telemetry\"") != std::string::npos;
  }
  check(records == 200 && r.steps == 200, "step-count exactness");

  Verdict v;
  v.pass = failed.empty();
  if (v.pass) {
    v.detail = fmt::format(
        "round-trip max error {:.1e} rad; monotonicity, nesting, serpenoid, dissipativity, "
        "frame invariance, ballast antisymmetry, determinism, 200 records for 1 s at 5 ms",
        worst);
  } else {
    for (const auto& f : failed) v.detail += (v.detail.empty() ? "" : ", ") + f;
    v.detail = "failed: " + v.detail;
  }
  return v;
}

Verdict obstacle_course() {
  const auto mod = scenario("course3d");
  const auto flat = scenario("course3d_unmodulated");
  const auto rm = run_scenario(mod, nullptr);
  const auto rf = run_scenario(flat, nullptr);

  // Where the unmodulated run stopped: which barrier band holds it.
  int blocking = -1;
  const double x = rf.final_state.head_pose.x;
  const double z = rf.final_state.depth_z;
  const double r = 0.5 * flat.geometry.module_diameter;
  for (std::size_t i = 0; i < flat.obstacles.lateral_barriers.size(); ++i) {
    const auto& b = flat.obstacles.lateral_barriers[i];
    const bool in_band = z + r >= b.z_lo && z - r <= b.z_hi;
    const bool at_wall = x <= b.x_max && x >= b.x_min - flat.geometry.body_length;
    if (in_band && at_wall) blocking = static_cast<int>(i);
  }

  Verdict v;
  v.pass = rm.outcome.kind == OutcomeKind::kSuccess && rf.outcome.kind == OutcomeKind::kStuck &&
           blocking >= 0;
  v.detail = fmt::format(
      "modulated G=1: {} at {:.2f} s (head x {:.2f} m); unmodulated G=1: {} at {:.2f} s, "
      "head x {:.3f} m, depth {:.2f} m, {}",
      outcome_name(rm.outcome.kind), rm.outcome.time, rm.final_state.head_pose.x,
      outcome_name(rf.outcome.kind), rf.outcome.time, x, z,
      blocking >= 0 ? fmt::format("held by barrier {}", blocking + 1)
                    : std::string("not at a barrier"));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) {
      expect_fail.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "straight swimming", straight_swimming},
      {2, "turning", turning},
      {3, "depth descent", descent},
      {4, "compliance-dependent lattice traversal", lattice},
      {5, "property suites", properties},
      {6, "3D obstacle course", obstacle_course},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expect_fail.count(c.id) > 0;
    const char* tag = v.pass ? "PASS" : (known ? "FAIL (known)" : "FAIL");
    std::printf("criterion %d %s: %s [%.1f s] %s\n", c.id, c.name, tag, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
