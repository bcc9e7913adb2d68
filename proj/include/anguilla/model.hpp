#pragma once

// Shared domain types for the articulated swimmer: planar chain of rigid
// modules joined by cable-driven revolute joints, plus scalar depth/pitch.
//
// Units are SI throughout. Angles are radians internally; config files may
// give any angle with a `_deg` key suffix instead.
//
// Planar frame: x forward, y to the left, heading counter-clockwise
// positive. Depth z is positive down.

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <vector>

#include "anguilla/error.hpp"

namespace anguilla {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;
inline constexpr double kWaterDensity = 1000.0;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

using Vec2 = Eigen::Vector2d;

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  bool operator==(const Pose2&) const = default;
};

/// Planar rigid-body velocity: linear velocity of a reference point plus
/// angular rate.
struct Twist2 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  bool operator==(const Twist2&) const = default;
};

/// Serpenoid template parameters.
struct GaitParams {
  double amplitude_A = deg_to_rad(30.0);
  double spatial_freq_xi = 0.5;
  double temporal_freq_omega = 0.2;  // Hz
  double offset_phi = 0.0;
  int joint_count_N = 3;

  double period() const { return 1.0 / temporal_freq_omega; }

  bool operator==(const GaitParams&) const = default;
};

/// Generalized compliance. `G` holds either one value (applied to every
/// joint) or one value per joint.
struct ComplianceParams {
  std::vector<double> G{0.0};
  double slack_gain_l0 = 0.25;  // m/rad

  double joint_G(int joint) const;

  bool operator==(const ComplianceParams&) const = default;
};

struct RobotGeometry {
  double cable_lateral_offset_Lc = 0.05;
  double joint_half_length_Lj = 0.075;
  double module_length = 0.10;
  double module_diameter = 0.10;
  int module_count = 4;
  double body_length = 1.013;
  double total_mass = 6.15;
  double neutral_fill = 0.5;
  double syringe_volume = 35e-6;
  int syringes_per_module = 2;
  double syringe_inner_diameter = 0.024;
  double gear_ratio = 36.0 / 16.0;
  double lead_primary = 0.002;
  double lead_secondary = 0.002;
  double drag_normal_Cn = 6.0;
  // Produced by `anguilla calibrate-drag` for the open-water gait.
  double drag_tangent_Ct = 0.4641;
  double heave_drag_cz = 8.0;
  double metacentric_height_h = 0.02;
  double pitch_time_constant = 2.0;
  double joint_limit = deg_to_rad(80.0);
  double joint_inertia_Ij = 0.01;
  double joint_damping_bj = 0.5;

  int joint_count() const { return module_count - 1; }
  /// Pivot-to-pivot spacing; links tile the whole body length.
  double link_pitch() const { return body_length / module_count; }
  /// Axial station of module k measured from the body centroid, positive
  /// toward the head.
  double module_station(int k) const;

  bool operator==(const RobotGeometry&) const = default;
};

/// Collects every violated invariant; empty means valid.
std::vector<FieldError> check_geometry(const RobotGeometry& geom);
std::vector<FieldError> check_gait(const GaitParams& gait);
std::vector<FieldError> check_compliance(const ComplianceParams& compliance,
                                         int joint_count);

/// Returns `geom` unchanged or throws ValidationError listing every
/// violation.
RobotGeometry validate_geometry(const RobotGeometry& geom);

struct CablePair {
  double left_length = 0.0;
  double right_length = 0.0;

  bool operator==(const CablePair&) const = default;
};

struct RobotState {
  Pose2 head_pose;
  std::vector<double> joint_angles;
  std::vector<double> joint_velocities;
  double depth_z = 0.0;
  double heave_rate = 0.0;
  double pitch = 0.0;
  double pitch_rate = 0.0;
  std::vector<double> fills;
  double sim_time = 0.0;
  // Head-link velocity from the last planar solve.
  Twist2 body_twist;
  std::vector<CablePair> cables;

  bool operator==(const RobotState&) const = default;
};

/// Initial state at rest with the given joint angles and fills.
RobotState make_state(const RobotGeometry& geom, const Pose2& head_pose,
                      std::vector<double> joint_angles, double depth_z,
                      std::vector<double> fills);

struct LinkPose {
  Vec2 center = Vec2::Zero();
  double heading = 0.0;

  Vec2 axis() const { return {std::cos(heading), std::sin(heading)}; }
};

/// Link poses (head first) and the joint pivots between them. Pivot i joins
/// link i to link i+1.
struct ChainPose {
  std::vector<LinkPose> links;
  std::vector<Vec2> pivots;
  double link_length = 0.0;

  Vec2 front(int link) const;
  Vec2 back(int link) const;
  Vec2 centroid() const;
};

/// Throws Error(kJointLimit) when any |angle| exceeds geom.joint_limit.
ChainPose forward_kinematics(const Pose2& head_pose,
                             std::span<const double> joint_angles,
                             const RobotGeometry& geom);

/// Velocity of world point `p` rigidly attached to `link`, given the head
/// twist (about the head link centre) and joint rates.
Vec2 point_velocity(const ChainPose& chain, int link, const Vec2& p,
                    const Twist2& head_twist,
                    std::span<const double> joint_rates);

/// Twist of every link (velocity of its centre plus angular rate).
std::vector<Twist2> link_twists(const ChainPose& chain,
                                const Twist2& head_twist,
                                std::span<const double> joint_rates);

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Rotates `v` by +90 degrees (z-hat cross v).
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace anguilla
