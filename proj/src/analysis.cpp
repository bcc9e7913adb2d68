#include "anguilla/analysis.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace anguilla {

namespace {

constexpr double kCircleTol = 1e-12;

bool inside(const Circle& c, const Vec2& p) {
  return (p - c.center).norm() <= c.radius * (1.0 + kCircleTol) + kCircleTol;
}

Circle from_two(const Vec2& a, const Vec2& b) {
  return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

Circle from_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross2(ab, ac);
  if (std::abs(d) < 1e-18) {
    // Collinear: the widest pair spans the circle.
    Circle best = from_two(a, b);
    for (const Circle& cand : {from_two(a, c), from_two(b, c)}) {
      if (cand.radius > best.radius) best = cand;
    }
    return best;
  }
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  const Vec2 off((ac.y() * ab2 - ab.y() * ac2) / d, (ab.x() * ac2 - ac.x() * ab2) / d);
  return {a + off, off.norm()};
}

std::vector<Vec2> body_points(const BodySample& s, const RobotGeometry& geom) {
  const ChainPose chain = forward_kinematics(s.head_pose, s.joint_angles, geom);
  std::vector<Vec2> pts;
  pts.push_back(chain.front(0));
  for (const auto& p : chain.pivots) pts.push_back(p);
  pts.push_back(chain.back(static_cast<int>(chain.links.size()) - 1));
  return pts;
}

double unwrap_near(double angle, double reference) {
  return angle - 2.0 * kPi * std::round((angle - reference) / (2.0 * kPi));
}

}  // namespace

double body_axis_heading(const ChainPose& chain) {
  const Vec2 d = chain.front(0) - chain.back(static_cast<int>(chain.links.size()) - 1);
  return std::atan2(d.y(), d.x());
}

SwimMetrics swim_metrics(std::span<const BodySample> samples, const RobotGeometry& geom,
                         double gait_period, int skip_cycles) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  }
  const double t0 = samples.front().time;
  struct CycleAverage {
    Vec2 centroid = Vec2::Zero();
    double heading = 0.0;
    int count = 0;
  };
  std::vector<CycleAverage> cycles;
  double last_heading = 0.0;
  bool have_heading = false;
  for (const auto& s : samples) {
    const auto c = static_cast<std::size_t>(std::floor((s.time - t0) / gait_period + 1e-9));
    if (cycles.size() <= c) cycles.resize(c + 1);
    const ChainPose chain = forward_kinematics(s.head_pose, s.joint_angles, geom);
    double h = body_axis_heading(chain);
    if (have_heading) h = unwrap_near(h, last_heading);
    last_heading = h;
    have_heading = true;
    cycles[c].centroid += chain.centroid();
    cycles[c].heading += h;
    cycles[c].count += 1;
  }
  // The trailing partial cycle would bias the averages.
  const double span = samples.back().time - t0;
  const auto whole = static_cast<std::size_t>(std::floor(span / gait_period + 1e-9));
  cycles.resize(std::min(cycles.size(), whole));
  const auto first = static_cast<std::size_t>(std::max(0, skip_cycles));
  if (cycles.size() < first + 2) {
    throw Error(ErrorCode::kInvalidArgument, "run too short for cycle-averaged metrics");
  }
  for (auto& c : cycles) {
    c.centroid /= c.count;
    c.heading /= c.count;
  }
  const CycleAverage& a = cycles[first];
  const CycleAverage& b = cycles.back();
  SwimMetrics m;
  m.cycles = static_cast<int>(cycles.size() - 1 - first);
  const Vec2 d = b.centroid - a.centroid;
  const Vec2 axis(std::cos(a.heading), std::sin(a.heading));
  m.bl_per_cycle = d.norm() / geom.body_length / m.cycles;
  m.forward_progress = d.dot(axis);
  m.lateral_drift = std::abs(cross2(axis, d));
  m.drift_ratio = m.forward_progress > 0.0 ? m.lateral_drift / m.forward_progress
                                           : std::numeric_limits<double>::infinity();
  m.heading_change_per_cycle = (b.heading - a.heading) / m.cycles;
  return m;
}

Circle enclosing_circle(std::vector<Vec2> points) {
  if (points.empty()) return {};
  // Fixed seed keeps the result bit-reproducible.
  std::mt19937 rng(12345);
  std::shuffle(points.begin(), points.end(), rng);
  Circle c{points[0], 0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (inside(c, points[i])) continue;
    c = {points[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, points[j])) continue;
      c = from_two(points[i], points[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!inside(c, points[k])) c = from_three(points[i], points[j], points[k]);
      }
    }
  }
  return c;
}

double sweep_radius(std::span<const BodySample> samples, const RobotGeometry& geom,
                    double t_begin, double t_end) {
  std::vector<Vec2> pts;
  for (const auto& s : samples) {
    if (s.time < t_begin || s.time > t_end) continue;
    for (const auto& p : body_points(s, geom)) pts.push_back(p);
  }
  return enclosing_circle(std::move(pts)).radius;
}

std::vector<BodySample> record_body(const ScenarioConfig& config) {
  Simulation sim(config);
  std::vector<BodySample> out;
  out.reserve(static_cast<std::size_t>(config.step_count()) + 1);
  const auto& s0 = sim.state().robot;
  out.push_back({s0.sim_time, s0.head_pose, s0.joint_angles});
  while (!sim.finished()) {
    auto rec = sim.step();
    if (!rec) break;
    out.push_back({rec->sim_time, rec->state.head_pose, rec->state.joint_angles});
  }
  return out;
}

ScenarioConfig open_water_scenario(const RobotGeometry& geom, const GaitParams& gait,
                                   double cycles) {
  ScenarioConfig c;
  c.name = "open_water";
  c.geometry = geom;
  c.gait = gait;
  c.gait.joint_count_N = geom.joint_count();
  c.compliance.G = {0.0};
  c.duration = cycles * gait.period();
  c.outcome.detect_stuck = false;
  return c;
}

CalibrationResult calibrate_drag(const RobotGeometry& geom, const GaitParams& gait,
                                 double target_bl_per_cycle, double cycles) {
  if (!(target_bl_per_cycle > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target speed must be > 0");
  }
  CalibrationResult result;
  result.drag_normal_Cn = geom.drag_normal_Cn;
  auto speed = [&](double ct) {
    RobotGeometry g = geom;
    g.drag_tangent_Ct = ct;
    const ScenarioConfig sc = open_water_scenario(g, gait, cycles);
    const auto samples = record_body(sc);
    ++result.evaluations;
    return swim_metrics(samples, g, gait.period()).bl_per_cycle;
  };
  // Speed falls monotonically as Ct approaches Cn.
  const double lo = geom.drag_normal_Cn / 100.0;
  const double hi = geom.drag_normal_Cn / 1.05;
  const double f_lo = speed(lo) - target_bl_per_cycle;
  const double f_hi = speed(hi) - target_bl_per_cycle;
  if (f_lo * f_hi > 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "target speed unreachable for Ct in (Cn/100, Cn/1.05)");
  }
  boost::uintmax_t max_iter = 60;
  const auto tol = boost::math::tools::eps_tolerance<double>(30);
  const auto [a, b] = boost::math::tools::toms748_solve(
      [&](double ct) { return speed(ct) - target_bl_per_cycle; }, lo, hi, f_lo, f_hi, tol,
      max_iter);
  result.drag_tangent_Ct = 0.5 * (a + b);
  result.achieved_bl_per_cycle = speed(result.drag_tangent_Ct);
  return result;
}

}  // namespace anguilla
