#include "anguilla/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace anguilla {

namespace {

std::string join_messages(const std::vector<FieldError>& errors) {
  std::ostringstream out;
  out << "validation failed:";
  for (const auto& e : errors) out << " [" << e.field << ": " << e.message << "]";
  return out.str();
}

class Checker {
 public:
  void positive(const char* field, double v) {
    if (!(std::isfinite(v) && v > 0.0)) add(field, "must be > 0");
  }
  void finite(const char* field, double v) {
    if (!std::isfinite(v)) add(field, "must be finite");
  }
  void open_range(const char* field, double v, double lo, double hi) {
    if (!(std::isfinite(v) && v > lo && v < hi)) {
      std::ostringstream m;
      m << "must lie in (" << lo << ", " << hi << ")";
      add(field, m.str());
    }
  }
  void closed_range(const char* field, double v, double lo, double hi) {
    if (!(std::isfinite(v) && v >= lo && v <= hi)) {
      std::ostringstream m;
      m << "must lie in [" << lo << ", " << hi << "]";
      add(field, m.str());
    }
  }
  void half_open_range(const char* field, double v, double lo, double hi) {
    if (!(std::isfinite(v) && v >= lo && v < hi)) {
      std::ostringstream m;
      m << "must lie in [" << lo << ", " << hi << ")";
      add(field, m.str());
    }
  }
  void add(std::string field, std::string message) {
    errors_.push_back({std::move(field), std::move(message)});
  }
  std::vector<FieldError> take() { return std::move(errors_); }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace

ValidationError::ValidationError(std::vector<FieldError> errors)
    : Error(ErrorCode::kValidation, join_messages(errors)),
      errors_(std::move(errors)) {}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kJointLimit: return "joint_limit";
    case ErrorCode::kInfeasibleCable: return "infeasible_cable";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kProtocol: return "protocol";
  }
  return "unknown";
}

double ComplianceParams::joint_G(int joint) const {
  if (G.empty()) return 0.0;
  if (G.size() == 1) return G.front();
  return G.at(static_cast<std::size_t>(joint));
}

double RobotGeometry::module_station(int k) const {
  return (0.5 * (module_count - 1) - k) * link_pitch();
}

std::vector<FieldError> check_geometry(const RobotGeometry& g) {
  Checker c;
  c.positive("cable_lateral_offset_Lc", g.cable_lateral_offset_Lc);
  c.positive("joint_half_length_Lj", g.joint_half_length_Lj);
  c.positive("module_length", g.module_length);
  c.positive("module_diameter", g.module_diameter);
  if (g.module_count < 2) c.add("module_count", "must be >= 2");
  c.positive("body_length", g.body_length);
  if (std::isfinite(g.body_length) && g.module_count >= 1 &&
      std::isfinite(g.module_length) &&
      g.module_length * g.module_count > g.body_length) {
    c.add("module_length", "modules longer than body_length");
  }
  c.positive("total_mass", g.total_mass);
  c.open_range("neutral_fill", g.neutral_fill, 0.0, 1.0);
  c.positive("syringe_volume", g.syringe_volume);
  if (g.syringes_per_module < 1) c.add("syringes_per_module", "must be >= 1");
  c.positive("syringe_inner_diameter", g.syringe_inner_diameter);
  c.positive("gear_ratio", g.gear_ratio);
  c.positive("lead_primary", g.lead_primary);
  c.finite("lead_secondary", g.lead_secondary);
  if (std::isfinite(g.lead_secondary) && g.lead_secondary < 0.0) {
    c.add("lead_secondary", "must be >= 0");
  }
  c.positive("drag_tangent_Ct", g.drag_tangent_Ct);
  c.positive("drag_normal_Cn", g.drag_normal_Cn);
  if (std::isfinite(g.drag_normal_Cn) && std::isfinite(g.drag_tangent_Ct) &&
      !(g.drag_normal_Cn > g.drag_tangent_Ct)) {
    c.add("drag_normal_Cn",
          "anisotropy required: drag_normal_Cn must exceed drag_tangent_Ct");
  }
  c.positive("heave_drag_cz", g.heave_drag_cz);
  c.positive("metacentric_height_h", g.metacentric_height_h);
  c.positive("pitch_time_constant", g.pitch_time_constant);
  c.open_range("joint_limit", g.joint_limit, 0.0, kPi);
  c.positive("joint_inertia_Ij", g.joint_inertia_Ij);
  c.positive("joint_damping_bj", g.joint_damping_bj);
  return c.take();
}

std::vector<FieldError> check_gait(const GaitParams& p) {
  Checker c;
  c.half_open_range("amplitude_A", p.amplitude_A, 0.0, kPi / 2);
  c.finite("spatial_freq_xi", p.spatial_freq_xi);
  c.positive("temporal_freq_omega", p.temporal_freq_omega);
  c.finite("offset_phi", p.offset_phi);
  if (p.joint_count_N < 1) c.add("joint_count_N", "must be >= 1");
  if (std::isfinite(p.offset_phi) && std::isfinite(p.amplitude_A) &&
      !(std::abs(p.offset_phi) + p.amplitude_A < kPi / 2)) {
    c.add("offset_phi", "|offset_phi| + amplitude_A must be < pi/2");
  }
  return c.take();
}

std::vector<FieldError> check_compliance(const ComplianceParams& cp,
                                         int joint_count) {
  Checker c;
  if (cp.G.empty()) c.add("G", "must hold one value or one per joint");
  if (cp.G.size() > 1 && static_cast<int>(cp.G.size()) != joint_count) {
    c.add("G", "per-joint list must have joint_count entries");
  }
  for (double g : cp.G) c.closed_range("G", g, 0.0, 1.0);
  c.positive("slack_gain_l0", cp.slack_gain_l0);
  return c.take();
}

RobotGeometry validate_geometry(const RobotGeometry& geom) {
  auto errors = check_geometry(geom);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return geom;
}

RobotState make_state(const RobotGeometry& geom, const Pose2& head_pose,
                      std::vector<double> joint_angles, double depth_z,
                      std::vector<double> fills) {
  RobotState s;
  s.head_pose = head_pose;
  s.joint_angles = std::move(joint_angles);
  s.joint_angles.resize(static_cast<std::size_t>(geom.joint_count()), 0.0);
  s.joint_velocities.assign(s.joint_angles.size(), 0.0);
  s.depth_z = depth_z;
  s.fills = std::move(fills);
  s.fills.resize(static_cast<std::size_t>(geom.module_count), geom.neutral_fill);
  s.cables.assign(s.joint_angles.size(), CablePair{});
  return s;
}

Vec2 ChainPose::front(int link) const {
  const auto& l = links[static_cast<std::size_t>(link)];
  return l.center + 0.5 * link_length * l.axis();
}

Vec2 ChainPose::back(int link) const {
  const auto& l = links[static_cast<std::size_t>(link)];
  return l.center - 0.5 * link_length * l.axis();
}

Vec2 ChainPose::centroid() const {
  Vec2 sum = Vec2::Zero();
  for (const auto& l : links) sum += l.center;
  return sum / static_cast<double>(links.size());
}

ChainPose forward_kinematics(const Pose2& head_pose,
                             std::span<const double> joint_angles,
                             const RobotGeometry& geom) {
  for (std::size_t i = 0; i < joint_angles.size(); ++i) {
    if (!(std::abs(joint_angles[i]) <= geom.joint_limit)) {
      std::ostringstream m;
      m << "joint " << i << " angle " << joint_angles[i]
        << " rad exceeds joint_limit " << geom.joint_limit;
      throw Error(ErrorCode::kJointLimit, m.str());
    }
  }
  ChainPose chain;
  chain.link_length = geom.link_pitch();
  const double half = 0.5 * chain.link_length;
  chain.links.resize(joint_angles.size() + 1);
  chain.pivots.resize(joint_angles.size());
  chain.links[0] = {Vec2(head_pose.x, head_pose.y), head_pose.heading};
  for (std::size_t i = 0; i < joint_angles.size(); ++i) {
    const LinkPose& prev = chain.links[i];
    chain.pivots[i] = prev.center - half * prev.axis();
    LinkPose next;
    next.heading = prev.heading + joint_angles[i];
    next.center = chain.pivots[i] - half * next.axis();
    chain.links[i + 1] = next;
  }
  return chain;
}

Vec2 point_velocity(const ChainPose& chain, int link, const Vec2& p,
                    const Twist2& head_twist,
                    std::span<const double> joint_rates) {
  const Vec2 head = chain.links[0].center;
  Vec2 v = Vec2(head_twist.vx, head_twist.vy) + head_twist.omega * perp(p - head);
  for (int i = 0; i < link; ++i) {
    v += joint_rates[static_cast<std::size_t>(i)] *
         perp(p - chain.pivots[static_cast<std::size_t>(i)]);
  }
  return v;
}

std::vector<Twist2> link_twists(const ChainPose& chain,
                                const Twist2& head_twist,
                                std::span<const double> joint_rates) {
  std::vector<Twist2> out(chain.links.size());
  double omega = head_twist.omega;
  for (std::size_t j = 0; j < chain.links.size(); ++j) {
    if (j > 0) omega += joint_rates[j - 1];
    const Vec2 v = point_velocity(chain, static_cast<int>(j),
                                  chain.links[j].center, head_twist,
                                  joint_rates);
    out[j] = {v.x(), v.y(), omega};
  }
  return out;
}

}  // namespace anguilla
