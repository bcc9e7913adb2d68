#include "anguilla/cable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anguilla {

namespace {

// Tolerance for lo > hi produced by rounding when both cables are exact.
constexpr double kCoincidentTol = 1e-9;

double anchor_angle(const RobotGeometry& g) {
  return std::atan(g.cable_lateral_offset_Lc / g.joint_half_length_Lj);
}

double left_path(double alpha, const RobotGeometry& g) {
  return cable_span(g) * std::cos(-0.5 * alpha + anchor_angle(g));
}

double right_path(double alpha, const RobotGeometry& g) {
  return cable_span(g) * std::cos(0.5 * alpha + anchor_angle(g));
}

}  // namespace

double cable_span(const RobotGeometry& g) {
  return 2.0 * std::hypot(g.cable_lateral_offset_Lc, g.joint_half_length_Lj);
}

double cable_working_limit(const RobotGeometry& g) {
  return std::min(g.joint_limit, 2.0 * anchor_angle(g));
}

CablePair exact_cable_lengths(double alpha, const RobotGeometry& geom) {
  if (!(std::abs(alpha) <= geom.joint_limit)) {
    std::ostringstream m;
    m << "cable geometry: angle " << alpha << " rad beyond joint_limit";
    throw Error(ErrorCode::kJointLimit, m.str());
  }
  return {left_path(alpha, geom), right_path(alpha, geom)};
}

CablePair commanded_cable_lengths(double alpha_suggested, double G,
                                  const GaitParams& gait, double slack_gain_l0,
                                  const RobotGeometry& geom) {
  if (!(G >= 0.0 && G <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "compliance G must lie in [0, 1]");
  }
  const double amplitude = gait.amplitude_A;
  const double phi = gait.offset_phi;
  const double rel = alpha_suggested - phi;
  if (!(std::abs(alpha_suggested) <= (amplitude + std::abs(phi)) * (1.0 + 1e-12))) {
    throw Error(ErrorCode::kInvalidArgument,
                "suggested angle beyond A + |phi|");
  }
  const double gamma = (2.0 * G - 1.0) * amplitude;
  const double anchor = std::min(amplitude, gamma);

  CablePair out = exact_cable_lengths(alpha_suggested, geom);
  if (rel > -gamma) {
    out.left_length = left_path(phi - anchor, geom) + slack_gain_l0 * (gamma + rel);
  }
  if (rel < gamma) {
    out.right_length = right_path(phi + anchor, geom) + slack_gain_l0 * (gamma - rel);
  }
  return out;
}

CablePair commanded_cable_lengths(double alpha_suggested, int joint,
                                  const ComplianceParams& compliance,
                                  const GaitParams& gait,
                                  const RobotGeometry& geom) {
  return commanded_cable_lengths(alpha_suggested, compliance.joint_G(joint), gait,
                                 compliance.slack_gain_l0, geom);
}

AngleInterval angle_interval_from_cables(const CablePair& pair,
                                         const RobotGeometry& geom) {
  const double span = cable_span(geom);
  const double beta = anchor_angle(geom);
  const double limit = geom.joint_limit;
  if (!(pair.left_length > 0.0 && pair.right_length > 0.0)) {
    throw Error(ErrorCode::kInfeasibleCable, "cable lengths must be positive");
  }
  // Inverse of the path length on the branch below the fold at 2 beta.
  double hi = 2.0 * (beta - std::acos(std::min(1.0, pair.left_length / span)));
  double lo = -2.0 * (beta - std::acos(std::min(1.0, pair.right_length / span)));
  if (hi < -limit || lo > limit) {
    std::ostringstream m;
    m << "cable shorter than reachable path (left " << pair.left_length
      << " m, right " << pair.right_length << " m)";
    throw Error(ErrorCode::kInfeasibleCable, m.str());
  }
  AngleInterval out;
  out.hi_from_cable = pair.left_length < span && hi < limit;
  out.lo_from_cable = pair.right_length < span && lo > -limit;
  out.hi = out.hi_from_cable ? hi : limit;
  out.lo = out.lo_from_cable ? lo : -limit;
  if (out.lo > out.hi) {
    if (out.lo - out.hi > kCoincidentTol) {
      std::ostringstream m;
      m << "cables over-constrain joint: lo " << out.lo << " > hi " << out.hi;
      throw Error(ErrorCode::kInfeasibleCable, m.str());
    }
    out.lo = out.hi = 0.5 * (out.lo + out.hi);
  }
  return out;
}

JointMotion resolve_joint_angle(const AngleInterval& interval, double alpha_prev,
                                double alpha_rate_prev, double tau_ext,
                                double dt, const RobotGeometry& geom,
                                const JointLoad& load) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  }
  const double inertia = geom.joint_inertia_Ij;
  const double damping = geom.joint_damping_bj + load.damping;
  const double rate = (inertia * alpha_rate_prev / dt + tau_ext) /
                      (inertia / dt + damping - load.stiffness * dt);

  JointMotion out;
  out.alpha = alpha_prev + dt * rate;
  out.alpha_rate = rate;
  if (out.alpha > interval.hi) {
    out.alpha = interval.hi;
    out.upper_bound_active = interval.hi_from_cable;
    out.at_joint_limit = !interval.hi_from_cable;
  } else if (out.alpha < interval.lo) {
    out.alpha = interval.lo;
    out.lower_bound_active = interval.lo_from_cable;
    out.at_joint_limit = !interval.lo_from_cable;
  }
  if (interval.lo == interval.hi) {
    out.alpha = interval.lo;
    out.lower_bound_active = interval.lo_from_cable;
    out.upper_bound_active = interval.hi_from_cable;
  }
  if (out.lower_bound_active || out.upper_bound_active || out.at_joint_limit) {
    out.alpha_rate = (out.alpha - alpha_prev) / dt;
  }
  if (out.lower_bound_active || out.upper_bound_active) {
    out.cable_torque = inertia * (out.alpha_rate - alpha_rate_prev) / dt +
                       damping * out.alpha_rate - tau_ext -
                       load.stiffness * (out.alpha - alpha_prev);
  }
  return out;
}

}  // namespace anguilla
