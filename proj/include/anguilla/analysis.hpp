#pragma once

// Gait performance metrics computed from a recorded run, and drag
// calibration against a target speed.

#include <span>
#include <vector>

#include "anguilla/engine.hpp"
#include "anguilla/model.hpp"

namespace anguilla {

struct BodySample {
  double time = 0.0;
  Pose2 head_pose;
  std::vector<double> joint_angles;
};

/// Straight-line tail-tip to head-tip direction of the body.
double body_axis_heading(const ChainPose& chain);

/// Quantities averaged cycle by cycle so the undulation itself cancels.
/// Cycles before `skip_cycles` are treated as start-up transient.
struct SwimMetrics {
  int cycles = 0;                 // whole cycles measured
  double bl_per_cycle = 0.0;      // net centroid travel / body length / cycle
  double forward_progress = 0.0;  // along the first measured body axis, m
  double lateral_drift = 0.0;     // across it, absolute, m
  double drift_ratio = 0.0;       // lateral / forward
  double heading_change_per_cycle = 0.0;  // rad, counter-clockwise positive
};

SwimMetrics swim_metrics(std::span<const BodySample> samples, const RobotGeometry& geom,
                         double gait_period, int skip_cycles = 1);

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Smallest circle enclosing every point (Welzl's algorithm).
Circle enclosing_circle(std::vector<Vec2> points);

/// Radius of the smallest circle holding the whole body (head tip, pivots,
/// tail tip) over the samples in [t_begin, t_end].
double sweep_radius(std::span<const BodySample> samples, const RobotGeometry& geom,
                    double t_begin, double t_end);

/// Runs `config` (obstacle-free) and records a body sample per step.
std::vector<BodySample> record_body(const ScenarioConfig& config);

/// Open-water scenario for the given gait and geometry with no obstacles.
ScenarioConfig open_water_scenario(const RobotGeometry& geom, const GaitParams& gait,
                                   double cycles);

struct CalibrationResult {
  double drag_tangent_Ct = 0.0;
  double drag_normal_Cn = 0.0;
  double achieved_bl_per_cycle = 0.0;
  int evaluations = 0;
};

/// Tunes Ct with Cn held at geom.drag_normal_Cn so the rigid (G = 0) gait
/// swims `target_bl_per_cycle` over `cycles` cycles. Throws kInvalidArgument
/// if no Ct in (Cn/100, Cn/1.05) reaches the target.
CalibrationResult calibrate_drag(const RobotGeometry& geom, const GaitParams& gait,
                                 double target_bl_per_cycle, double cycles = 10.0);

}  // namespace anguilla
