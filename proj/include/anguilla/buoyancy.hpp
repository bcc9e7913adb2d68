#pragma once

// Syringe ballast: leadscrew kinematics, net ballast mass, pitch equilibrium
// and the heave/pitch integrator.

#include <optional>
#include <span>

#include "anguilla/model.hpp"

namespace anguilla {

/// Full syringe stroke, volume / piston area.
double max_stroke(const RobotGeometry& geom);

/// Stroke of the two-stage telescoping leadscrew for a motor rotation,
/// saturating at [0, max_stroke].
double leadscrew_stroke(double motor_angle, const RobotGeometry& geom);

/// Fill fraction for a motor rotation.
double leadscrew_fill(double motor_angle, const RobotGeometry& geom);

/// Motor rotation (rad) that produces a full stroke.
double full_stroke_motor_angle(const RobotGeometry& geom);

/// Stroke per motor revolution of the telescoping screw over that of a
/// single stage with the primary lead.
double telescoping_gain(const RobotGeometry& geom);

/// Ballast of one module relative to neutral fill (positive = heavier).
double module_ballast_mass(double fill, const RobotGeometry& geom);

/// Sum of module ballast masses. Throws kInvalidArgument for fills outside
/// [0, 1].
double net_ballast_mass(std::span<const double> fills, const RobotGeometry& geom);

/// Axial offset of the centre of mass from the centroid, positive toward
/// the head.
double axial_com_offset(std::span<const double> fills, const RobotGeometry& geom);

/// Static pitch at which the centre of mass hangs below the centroid.
/// Positive is head-down.
double pitch_equilibrium(std::span<const double> fills, const RobotGeometry& geom);

/// Terminal heave speed sqrt(|dm| g / cz) for a constant ballast.
double terminal_velocity(double ballast_mass, const RobotGeometry& geom);

struct VerticalState {
  double depth_z = 0.0;
  double heave_rate = 0.0;
  double pitch = 0.0;
  double pitch_rate = 0.0;
};

/// One semi-implicit step of
///   (m + dm) dv/dt = dm g - cz v |v|
/// and a critically damped relaxation of pitch toward equilibrium with the
/// geometry's pitch time constant. Depth is clamped to [0, floor_depth].
VerticalState step_vertical(const VerticalState& state,
                            std::span<const double> fills, double dt,
                            const RobotGeometry& geom,
                            std::optional<double> floor_depth = std::nullopt);

}  // namespace anguilla
