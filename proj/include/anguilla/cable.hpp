#pragma once

// Bilateral cable actuation for one joint.
//
// Each joint carries a left and right inextensible, tension-only cable. The
// geometric path length of each cable is a function of the joint angle;
// a commanded cable length L therefore only imposes path(alpha) <= L. Left
// path length grows with alpha and right path length shrinks, so the two
// cables bound the joint to an interval [lo, hi]. Compliance G chooses how
// much slack each cable is given around the suggested angle.

#include "anguilla/model.hpp"

namespace anguilla {

struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
  /// False when the bound is the mechanical joint limit rather than a cable.
  bool lo_from_cable = true;
  bool hi_from_cable = true;

  bool contains(double alpha, double tol = 0.0) const {
    return alpha >= lo - tol && alpha <= hi + tol;
  }
  bool contains(const AngleInterval& other, double tol = 0.0) const {
    return other.lo >= lo - tol && other.hi <= hi + tol;
  }
  double width() const { return hi - lo; }
};

/// Path lengths of the left and right cables when the joint sits at
/// `alpha`. Throws Error(kJointLimit) beyond the joint limit.
CablePair exact_cable_lengths(double alpha, const RobotGeometry& geom);

/// Length of the cable anchor diagonal, 2 sqrt(Lc^2 + Lj^2).
double cable_span(const RobotGeometry& geom);

/// Largest |alpha| over which both path lengths are strictly monotone:
/// min(joint_limit, 2 atan(Lc / Lj)). Past 2 atan(Lc / Lj) a cable's path
/// shortens again, so exact lengths only invert uniquely inside this range.
double cable_working_limit(const RobotGeometry& geom);

/// Commanded cable lengths for a suggested angle under compliance `G`.
///
/// With gamma = (2G - 1) A, a cable tracks the exact length while the
/// suggested angle is on its taut side of -gamma (left) or +gamma (right)
/// and is paid out at slack_gain_l0 per radian past that point. The policy
/// is centred on the gait offset phi so a turning gait keeps G = 0 rigid.
CablePair commanded_cable_lengths(double alpha_suggested, double G,
                                  const GaitParams& gait, double slack_gain_l0,
                                  const RobotGeometry& geom);

CablePair commanded_cable_lengths(double alpha_suggested, int joint,
                                  const ComplianceParams& compliance,
                                  const GaitParams& gait,
                                  const RobotGeometry& geom);

/// Joint-angle interval admitted by the two cable lengths. A cable paid out
/// beyond the anchor span can never tighten, so that side is bounded only by
/// the joint limit. Throws
/// Error(kInfeasibleCable) when a cable is shorter than any reachable path
/// or the cables demand disjoint bounds.
AngleInterval angle_interval_from_cables(const CablePair& pair,
                                         const RobotGeometry& geom);

/// Linearized external load around the current angle: torque changes by
/// `stiffness` per radian of motion (stiffness <= 0 for restoring loads)
/// and `damping` resists joint rate. Both are treated implicitly.
struct JointLoad {
  double stiffness = 0.0;
  double damping = 0.0;
};

struct JointMotion {
  double alpha = 0.0;
  double alpha_rate = 0.0;
  /// Torque the cables had to apply this step; zero while both are slack
  /// or when the joint rests on its mechanical limit.
  double cable_torque = 0.0;
  bool lower_bound_active = false;  // right cable taut
  bool upper_bound_active = false;  // left cable taut
  bool at_joint_limit = false;
};

/// One step of I_j a'' = tau_ext - b_j a' for the joint (semi-implicit
/// Euler) followed by projection onto `interval`. A projected joint moves
/// with the bound: its rate becomes the displacement over dt, which is zero
/// on a stationary bound.
JointMotion resolve_joint_angle(const AngleInterval& interval, double alpha_prev,
                                double alpha_rate_prev, double tau_ext,
                                double dt, const RobotGeometry& geom,
                                const JointLoad& load = {});

}  // namespace anguilla
