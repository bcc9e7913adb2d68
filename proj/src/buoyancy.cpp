#include "anguilla/buoyancy.hpp"

#include <algorithm>
#include <cmath>

namespace anguilla {

namespace {

void check_fills(std::span<const double> fills) {
  for (double f : fills) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "fill fractions must lie in [0, 1]");
    }
  }
}

}  // namespace

double max_stroke(const RobotGeometry& g) {
  const double radius = 0.5 * g.syringe_inner_diameter;
  return g.syringe_volume / (kPi * radius * radius);
}

double leadscrew_stroke(double motor_angle, const RobotGeometry& g) {
  const double stroke =
      g.gear_ratio * (g.lead_primary + g.lead_secondary) * motor_angle / (2.0 * kPi);
  return std::clamp(stroke, 0.0, max_stroke(g));
}

double leadscrew_fill(double motor_angle, const RobotGeometry& g) {
  return leadscrew_stroke(motor_angle, g) / max_stroke(g);
}

double full_stroke_motor_angle(const RobotGeometry& g) {
  return 2.0 * kPi * max_stroke(g) /
         (g.gear_ratio * (g.lead_primary + g.lead_secondary));
}

double telescoping_gain(const RobotGeometry& g) {
  return (g.lead_primary + g.lead_secondary) / g.lead_primary;
}

double module_ballast_mass(double fill, const RobotGeometry& g) {
  return (fill - g.neutral_fill) * g.syringes_per_module * g.syringe_volume *
         kWaterDensity;
}

double net_ballast_mass(std::span<const double> fills, const RobotGeometry& g) {
  check_fills(fills);
  double dm = 0.0;
  for (double f : fills) dm += module_ballast_mass(f, g);
  return dm;
}

double axial_com_offset(std::span<const double> fills, const RobotGeometry& g) {
  const double dm = net_ballast_mass(fills, g);
  double moment = 0.0;
  for (std::size_t k = 0; k < fills.size(); ++k) {
    moment += module_ballast_mass(fills[k], g) * g.module_station(static_cast<int>(k));
  }
  const double mass = g.total_mass + dm;
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "total mass with ballast must be > 0");
  }
  return moment / mass;
}

double pitch_equilibrium(std::span<const double> fills, const RobotGeometry& g) {
  return std::atan(axial_com_offset(fills, g) / g.metacentric_height_h);
}

double terminal_velocity(double ballast_mass, const RobotGeometry& g) {
  return std::sqrt(std::abs(ballast_mass) * kGravity / g.heave_drag_cz);
}

VerticalState step_vertical(const VerticalState& s, std::span<const double> fills,
                            double dt, const RobotGeometry& g,
                            std::optional<double> floor_depth) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  const double dm = net_ballast_mass(fills, g);
  const double mass = g.total_mass + dm;

  VerticalState n;
  // Quadratic drag linearized about the current speed keeps the update
  // unconditionally stable.
  n.heave_rate = (mass * s.heave_rate + dt * dm * kGravity) /
                 (mass + dt * g.heave_drag_cz * std::abs(s.heave_rate));
  n.depth_z = s.depth_z + dt * n.heave_rate;
  if (n.depth_z <= 0.0) {
    n.depth_z = 0.0;
    n.heave_rate = std::max(n.heave_rate, 0.0);
  }
  if (floor_depth && n.depth_z >= *floor_depth) {
    n.depth_z = *floor_depth;
    n.heave_rate = std::min(n.heave_rate, 0.0);
  }

  const double wn = 1.0 / g.pitch_time_constant;
  const double target = pitch_equilibrium(fills, g);
  const double accel = wn * wn * (target - s.pitch) - 2.0 * wn * s.pitch_rate;
  n.pitch_rate = s.pitch_rate + dt * accel;
  n.pitch = s.pitch + dt * n.pitch_rate;

  if (!(std::isfinite(n.depth_z) && std::isfinite(n.heave_rate) &&
        std::isfinite(n.pitch) && std::isfinite(n.pitch_rate))) {
    throw Error(ErrorCode::kDiverged, "vertical step produced a non-finite state");
  }
  return n;
}

}  // namespace anguilla
