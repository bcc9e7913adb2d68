#pragma once

// Obstacle fields, penalty contact between the link capsules and obstacles,
// and scenario outcome classification.

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anguilla/cable.hpp"
#include "anguilla/hydro.hpp"
#include "anguilla/model.hpp"

namespace anguilla {

struct Post {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Wall across the swimming lane occupying x in [x_min, x_max] for depths
/// z in [z_lo, z_hi]. It blocks the body only while the body's depth span
/// overlaps the band.
struct LateralBarrier {
  double z_lo = 0.0;
  double z_hi = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
};

struct Bounds {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct LatticeRecipe {
  double spacing = 0.25;
  double post_diameter = 0.076;
  int rows = 5;
  int cols = 8;
  Vec2 origin = Vec2::Zero();
};

struct ObstacleField {
  std::vector<Post> posts;
  std::vector<LateralBarrier> lateral_barriers;
  std::optional<Bounds> bounds;
  /// Set when the posts came from build_hex_lattice.
  std::optional<LatticeRecipe> lattice;
};

/// Hexagonal lattice: rows advance along +x at spacing*sqrt(3)/2; columns
/// are centred on origin.y; odd rows shift by -spacing/2. Bounds enclose
/// every post. Throws kInvalidArgument when spacing <= post_diameter.
ObstacleField build_hex_lattice(double spacing, double post_diameter, int rows,
                                int cols, const Vec2& origin);
ObstacleField build_hex_lattice(const LatticeRecipe& recipe);

/// Bounding rectangle of all posts (including radii).
Bounds post_extent(std::span<const Post> posts);

std::vector<FieldError> check_field(const ObstacleField& field);

struct ContactParams {
  double stiffness_kc = 5000.0;  // N/m
  double damping = 50.0;         // N s/m
  double friction_mu = 0.2;
  /// Sliding speed below which Coulomb friction is regularized to viscous.
  double slip_velocity = 0.01;   // m/s
};

std::vector<FieldError> check_contact(const ContactParams& params);

struct Contact {
  int link = 0;
  Vec2 point = Vec2::Zero();   // closest point on the link axis
  Vec2 normal = Vec2::Zero();  // unit, from obstacle toward link
  double depth = 0.0;          // penetration, > 0
  int obstacle = 0;            // post index, or barrier index when is_barrier
  bool is_barrier = false;
  /// Force on the link; the obstacle feels the negative.
  Vec2 force = Vec2::Zero();
};

/// Penetrating capsule/obstacle pairs for the current pose. The capsule
/// radius is module_diameter / 2. Barriers are tested only when the depth
/// span [depth_z - r, depth_z + r] overlaps their band.
std::vector<Contact> find_contacts(const ChainPose& chain,
                                   const ObstacleField& field,
                                   const RobotGeometry& geom, double depth_z);

struct ContactForces {
  std::vector<LinkWrench> link_wrenches;  // torque about the head centre
  std::vector<double> joint_torques;      // from links distal to each joint
  std::vector<bool> link_in_contact;
  std::vector<Contact> contacts;
};

/// Penalty normal force k_c delta minus damping along the normal (never
/// adhesive), plus regularized Coulomb friction opposing sliding. Link
/// velocities come from the head twist and joint rates.
ContactForces contact_forces(const ChainPose& chain, std::vector<Contact> contacts,
                             const ContactParams& params, const Twist2& head_twist,
                             std::span<const double> joint_rates);

ContactForces contact_forces(const ChainPose& chain, const ObstacleField& field,
                             const RobotGeometry& geom, const ContactParams& params,
                             double depth_z, const Twist2& head_twist = {},
                             std::span<const double> joint_rates = {});

/// Elastic torque that contacts on links distal to `joint` exert about its
/// pivot, with the stiffness and damping of that torque with respect to the
/// joint angle for implicit joint resolution.
struct JointContactLoad {
  double torque = 0.0;
  JointLoad load;
};

JointContactLoad joint_contact_load(const ChainPose& chain,
                                    std::span<const Contact> contacts, int joint,
                                    const ContactParams& params);

/// Quasi-static head twist with drag and contacts coupled implicitly over
/// one step of length dt. Friction is solved by iteratively reweighted
/// least squares on the sliding speed.
Twist2 solve_body_velocity_in_contact(const ChainPose& chain,
                                      std::span<const double> joint_rates,
                                      std::span<const Contact> contacts,
                                      const ContactParams& params, double dt,
                                      const RobotGeometry& geom);

enum class OutcomeKind { kSuccess, kStuck, kOverload, kTimeout };

const char* outcome_name(OutcomeKind kind);
std::optional<OutcomeKind> outcome_from_name(const std::string& name);

struct Outcome {
  OutcomeKind kind = OutcomeKind::kTimeout;
  double time = 0.0;
  std::string evidence;

  bool operator==(const Outcome&) const = default;
};

struct OutcomeCriteria {
  double progress_eps = 0.02;   // m
  double stuck_window = 15.0;   // s
  double tau_max = 1.4;         // N m
  double t_over = 2.0;          // s
  bool detect_stuck = true;
  std::optional<double> far_x;  // Success once head x exceeds this
  double duration = 0.0;        // Timeout horizon
};

struct OutcomeSample {
  double time = 0.0;
  double head_x = 0.0;
  std::vector<double> joint_torques;
};

/// Incremental classifier fed one sample per step, in time order.
class OutcomeTracker {
 public:
  explicit OutcomeTracker(OutcomeCriteria criteria);

  /// Records the starting position so the stuck window opens at that time.
  void start(double time, double head_x);

  /// Returns the terminal outcome on the first sample that triggers one.
  std::optional<Outcome> update(const OutcomeSample& sample);
  /// Outcome if the run ends now without an earlier terminal outcome.
  Outcome timeout(double time) const;

  const OutcomeCriteria& criteria() const { return criteria_; }

 private:
  OutcomeCriteria criteria_;
  std::deque<std::pair<double, double>> history_;  // (time, head x)
  std::vector<double> over_time_;
  std::optional<double> last_time_;
};

/// Classifies a whole telemetry stream. Samples are ordered by time first,
/// so the result does not depend on input order.
Outcome classify_outcome(std::vector<OutcomeSample> stream,
                         const OutcomeCriteria& criteria);

}  // namespace anguilla
