#pragma once

// Linear anisotropic resistive-force hydrodynamics and the quasi-static
// planar force balance.
//
// Per unit length a link element moving with velocity v feels
//   f = -Ct (v.t) t - Cn (v.n) n
// where t is the link axis and n its left normal. Link forces are integrated
// with Simpson's rule over the endpoints and midpoint. Body inertia is
// neglected in-plane: at every instant the head twist is chosen so the total
// fluid plus external wrench vanishes.

#include <Eigen/Core>

#include <span>
#include <vector>

#include "anguilla/model.hpp"

namespace anguilla {

/// Force on a link and its torque about a stated reference point (the body
/// origin, i.e. the head link centre, unless noted).
struct LinkWrench {
  Vec2 force = Vec2::Zero();
  double torque = 0.0;

  LinkWrench& operator+=(const LinkWrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }

  bool operator==(const LinkWrench& o) const {
    return force == o.force && torque == o.torque;
  }
};

/// Drag wrench on one link of length geom.link_pitch() whose centre moves
/// with `velocity` (vx, vy of the centre, omega). Torque is about
/// `reference`.
LinkWrench link_drag(const LinkPose& pose, const Twist2& velocity,
                     const RobotGeometry& geom, const Vec2& reference);

/// Same, with torque about the link centre.
LinkWrench link_drag(const LinkPose& pose, const Twist2& velocity,
                     const RobotGeometry& geom);

/// Drag on every link for a given head twist and joint rates, torques about
/// the head link centre.
std::vector<LinkWrench> chain_drag(const ChainPose& chain,
                                   const Twist2& head_twist,
                                   std::span<const double> joint_rates,
                                   const RobotGeometry& geom);

/// Drag torque about joint pivot `joint` produced by the links distal to it
/// (links joint+1 ... end).
double distal_drag_torque(const ChainPose& chain, int joint,
                          const Twist2& head_twist,
                          std::span<const double> joint_rates,
                          const RobotGeometry& geom);

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

/// Resistance matrix R: the total drag wrench (Fx, Fy, torque about head
/// centre) for head twist V at zero shape rate is -R V. R is symmetric
/// positive definite for Cn, Ct > 0.
Matrix3 resistance_matrix(const ChainPose& chain, const RobotGeometry& geom);

/// Total drag wrench from shape rates alone (head twist zero).
Vector3 shape_drag(const ChainPose& chain, std::span<const double> joint_rates,
                   const RobotGeometry& geom);

inline Vector3 to_vector(const Twist2& t) { return {t.vx, t.vy, t.omega}; }
inline Twist2 to_twist(const Vector3& v) { return {v.x(), v.y(), v.z()}; }
inline Vector3 to_vector(const LinkWrench& w) {
  return {w.force.x(), w.force.y(), w.torque};
}

/// Head twist balancing drag against the summed external wrenches (torques
/// about the head centre).
Twist2 solve_body_velocity(const ChainPose& chain,
                           std::span<const double> joint_rates,
                           std::span<const LinkWrench> external,
                           const RobotGeometry& geom);

/// Advances the head pose by `twist` over dt (twist expressed at the head
/// centre in the world frame).
Pose2 integrate_pose(const Pose2& pose, const Twist2& twist, double dt);

/// Replaces joint angles and rates with the resolved values, solves the
/// head twist for the new shape against `external` wrenches, and advances
/// the head pose and clock by dt. Throws Error(kDiverged) if any result is
/// non-finite; `state` is left untouched.
RobotState step_planar(const RobotState& state,
                       std::span<const double> resolved_angles,
                       std::span<const double> resolved_rates,
                       std::span<const LinkWrench> external,
                       const RobotGeometry& geom, double dt);

/// Shared tail of step_planar for callers that solve the twist themselves.
RobotState advance_planar(const RobotState& state,
                          std::span<const double> resolved_angles,
                          std::span<const double> resolved_rates,
                          const Twist2& body_twist, double dt);

}  // namespace anguilla
