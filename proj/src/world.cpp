#include "anguilla/world.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace anguilla {

namespace {

constexpr double kTimeTol = 1e-9;
constexpr int kFrictionIterations = 12;
constexpr double kFrictionTol = 1e-9;

Vec2 closest_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + s * ab;
}

std::vector<double> rates_or_zero(std::span<const double> rates, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, rates.size()); ++i) out[i] = rates[i];
  return out;
}

}  // namespace

ObstacleField build_hex_lattice(double spacing, double post_diameter, int rows,
                                int cols, const Vec2& origin) {
  if (!(post_diameter > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "post_diameter must be > 0");
  }
  if (!(spacing > post_diameter)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lattice spacing must exceed post_diameter (posts would overlap)");
  }
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidArgument, "lattice needs at least one row and column");
  }
  ObstacleField field;
  const double row_pitch = spacing * std::sqrt(3.0) / 2.0;
  for (int r = 0; r < rows; ++r) {
    const double shift = (r % 2 == 1) ? -0.5 * spacing : 0.0;
    for (int c = 0; c < cols; ++c) {
      const double y = origin.y() + (c - 0.5 * (cols - 1)) * spacing + shift;
      field.posts.push_back({Vec2(origin.x() + r * row_pitch, y), 0.5 * post_diameter});
    }
  }
  field.bounds = post_extent(field.posts);
  field.lattice = LatticeRecipe{spacing, post_diameter, rows, cols, origin};
  return field;
}

ObstacleField build_hex_lattice(const LatticeRecipe& r) {
  return build_hex_lattice(r.spacing, r.post_diameter, r.rows, r.cols, r.origin);
}

Bounds post_extent(std::span<const Post> posts) {
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : posts) {
    b.x_min = std::min(b.x_min, p.center.x() - p.radius);
    b.x_max = std::max(b.x_max, p.center.x() + p.radius);
    b.y_min = std::min(b.y_min, p.center.y() - p.radius);
    b.y_max = std::max(b.y_max, p.center.y() + p.radius);
  }
  return b;
}

std::vector<FieldError> check_field(const ObstacleField& field) {
  std::vector<FieldError> errors;
  for (std::size_t i = 0; i < field.posts.size(); ++i) {
    const auto& p = field.posts[i];
    const std::string name = "obstacles.posts[" + std::to_string(i) + "]";
    if (!(p.radius > 0.0 && std::isfinite(p.radius))) {
      errors.push_back({name + ".radius", "must be > 0"});
    }
    if (!(std::isfinite(p.center.x()) && std::isfinite(p.center.y()))) {
      errors.push_back({name + ".center", "must be finite"});
    } else if (field.bounds) {
      const auto& b = *field.bounds;
      if (p.center.x() < b.x_min || p.center.x() > b.x_max ||
          p.center.y() < b.y_min || p.center.y() > b.y_max) {
        errors.push_back({name + ".center", "must lie within obstacles.bounds"});
      }
    }
  }
  for (std::size_t i = 0; i < field.lateral_barriers.size(); ++i) {
    const auto& b = field.lateral_barriers[i];
    const std::string name = "obstacles.lateral_barriers[" + std::to_string(i) + "]";
    if (!(b.z_lo < b.z_hi)) errors.push_back({name, "z_lo must be < z_hi"});
    if (!(b.x_min < b.x_max)) errors.push_back({name, "x_min must be < x_max"});
  }
  if (field.bounds) {
    const auto& b = *field.bounds;
    if (!(b.x_min < b.x_max && b.y_min < b.y_max)) {
      errors.push_back({"obstacles.bounds", "min must be < max on both axes"});
    }
  }
  return errors;
}

std::vector<FieldError> check_contact(const ContactParams& p) {
  std::vector<FieldError> errors;
  if (!(p.stiffness_kc > 0.0)) errors.push_back({"contact.stiffness_kc", "must be > 0"});
  if (!(p.damping >= 0.0)) errors.push_back({"contact.damping", "must be >= 0"});
  if (!(p.friction_mu >= 0.0)) errors.push_back({"contact.friction_mu", "must be >= 0"});
  if (!(p.slip_velocity > 0.0)) errors.push_back({"contact.slip_velocity", "must be > 0"});
  return errors;
}

std::vector<Contact> find_contacts(const ChainPose& chain, const ObstacleField& field,
                                   const RobotGeometry& geom, double depth_z) {
  const double r = 0.5 * geom.module_diameter;
  std::vector<Contact> out;
  for (int j = 0; j < static_cast<int>(chain.links.size()); ++j) {
    const Vec2 a = chain.front(j);
    const Vec2 b = chain.back(j);
    for (int k = 0; k < static_cast<int>(field.posts.size()); ++k) {
      const Post& post = field.posts[static_cast<std::size_t>(k)];
      const Vec2 q = closest_on_segment(a, b, post.center);
      const Vec2 d = q - post.center;
      const double dist = d.norm();
      const double depth = r + post.radius - dist;
      if (depth <= 0.0) continue;
      const Vec2 n = dist > 0.0 ? Vec2(d / dist) : perp(chain.links[static_cast<std::size_t>(j)].axis());
      out.push_back({j, q, n, depth, k, false, Vec2::Zero()});
    }
    for (int k = 0; k < static_cast<int>(field.lateral_barriers.size()); ++k) {
      const LateralBarrier& bar = field.lateral_barriers[static_cast<std::size_t>(k)];
      if (!(depth_z - r < bar.z_hi && depth_z + r > bar.z_lo)) continue;
      const bool a_front = a.x() >= b.x();
      const Vec2& hi_end = a_front ? a : b;
      const Vec2& lo_end = a_front ? b : a;
      if (!(hi_end.x() + r > bar.x_min && lo_end.x() - r < bar.x_max)) continue;
      const double centre_x = chain.links[static_cast<std::size_t>(j)].center.x();
      if (centre_x < 0.5 * (bar.x_min + bar.x_max)) {
        out.push_back({j, hi_end, Vec2(-1.0, 0.0), hi_end.x() + r - bar.x_min, k, true,
                       Vec2::Zero()});
      } else {
        out.push_back({j, lo_end, Vec2(1.0, 0.0), bar.x_max - (lo_end.x() - r), k, true,
                       Vec2::Zero()});
      }
    }
  }
  return out;
}

ContactForces contact_forces(const ChainPose& chain, std::vector<Contact> contacts,
                             const ContactParams& params, const Twist2& head_twist,
                             std::span<const double> joint_rates) {
  const std::size_t links = chain.links.size();
  const auto rates = rates_or_zero(joint_rates, chain.pivots.size());
  const Vec2 origin = chain.links.front().center;
  ContactForces out;
  out.link_wrenches.assign(links, LinkWrench{});
  out.joint_torques.assign(chain.pivots.size(), 0.0);
  out.link_in_contact.assign(links, false);
  for (auto& c : contacts) {
    const Vec2 v = point_velocity(chain, c.link, c.point, head_twist, rates);
    const Vec2 t = perp(c.normal);
    const double fn = std::max(0.0, params.stiffness_kc * c.depth -
                                        params.damping * v.dot(c.normal));
    const double vt = v.dot(t);
    const double ft = -params.friction_mu * fn * vt / std::max(std::abs(vt), params.slip_velocity);
    c.force = fn * c.normal + ft * t;
    auto& w = out.link_wrenches[static_cast<std::size_t>(c.link)];
    w.force += c.force;
    w.torque += cross2(c.point - origin, c.force);
    out.link_in_contact[static_cast<std::size_t>(c.link)] = true;
    for (int i = 0; i < c.link; ++i) {
      out.joint_torques[static_cast<std::size_t>(i)] +=
          cross2(c.point - chain.pivots[static_cast<std::size_t>(i)], c.force);
    }
  }
  out.contacts = std::move(contacts);
  return out;
}

ContactForces contact_forces(const ChainPose& chain, const ObstacleField& field,
                             const RobotGeometry& geom, const ContactParams& params,
                             double depth_z, const Twist2& head_twist,
                             std::span<const double> joint_rates) {
  return contact_forces(chain, find_contacts(chain, field, geom, depth_z), params,
                        head_twist, joint_rates);
}

JointContactLoad joint_contact_load(const ChainPose& chain,
                                    std::span<const Contact> contacts, int joint,
                                    const ContactParams& params) {
  const Vec2 pivot = chain.pivots[static_cast<std::size_t>(joint)];
  JointContactLoad out;
  for (const auto& c : contacts) {
    if (c.link <= joint) continue;
    const double lever = c.normal.dot(perp(c.point - pivot));
    out.torque += lever * params.stiffness_kc * c.depth;
    out.load.stiffness -= params.stiffness_kc * lever * lever;
    out.load.damping += params.damping * lever * lever;
  }
  return out;
}

Twist2 solve_body_velocity_in_contact(const ChainPose& chain,
                                      std::span<const double> joint_rates,
                                      std::span<const Contact> contacts,
                                      const ContactParams& params, double dt,
                                      const RobotGeometry& geom) {
  using Matrix23 = Eigen::Matrix<double, 2, 3>;
  const Matrix3 R0 = resistance_matrix(chain, geom);
  const Vector3 rhs0 = shape_drag(chain, joint_rates, geom);
  if (contacts.empty()) return to_twist(R0.llt().solve(rhs0));

  struct Linearized {
    Matrix23 G;  // head twist -> contact point velocity
    Vec2 shape_v;
    Vec2 n;
    Vec2 t;
    double depth;
  };
  const Vec2 origin = chain.links.front().center;
  std::vector<Linearized> lin;
  lin.reserve(contacts.size());
  for (const auto& c : contacts) {
    Linearized l;
    const Vec2 d = c.point - origin;
    l.G << 1.0, 0.0, -d.y(), 0.0, 1.0, d.x();
    l.shape_v = point_velocity(chain, c.link, c.point, Twist2{}, joint_rates);
    l.n = c.normal;
    l.t = perp(c.normal);
    l.depth = c.depth;
    lin.push_back(l);
  }

  const double normal_gain = params.damping + dt * params.stiffness_kc;
  std::optional<Vector3> V;
  for (int it = 0; it < kFrictionIterations; ++it) {
    Matrix3 R = R0;
    Vector3 rhs = rhs0;
    for (const auto& l : lin) {
      double friction_gain = 0.0;
      if (V) {
        const double vt = l.t.dot(l.G * *V + l.shape_v);
        friction_gain = params.friction_mu * params.stiffness_kc * l.depth /
                        std::max(std::abs(vt), params.slip_velocity);
      }
      const Eigen::Matrix2d K = normal_gain * l.n * l.n.transpose() +
                                friction_gain * l.t * l.t.transpose();
      const Vec2 f0 = params.stiffness_kc * l.depth * l.n - K * l.shape_v;
      R.noalias() += l.G.transpose() * K * l.G;
      rhs.noalias() += l.G.transpose() * f0;
    }
    const Vector3 next = R.partialPivLu().solve(rhs);
    const bool converged = V && (next - *V).cwiseAbs().maxCoeff() < kFrictionTol;
    V = next;
    if (converged) break;
  }
  return to_twist(*V);
}

const char* outcome_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kSuccess: return "Success";
    case OutcomeKind::kStuck: return "Stuck";
    case OutcomeKind::kOverload: return "Overload";
    case OutcomeKind::kTimeout: return "Timeout";
  }
  return "Timeout";
}

std::optional<OutcomeKind> outcome_from_name(const std::string& name) {
  for (auto k : {OutcomeKind::kSuccess, OutcomeKind::kStuck, OutcomeKind::kOverload,
                 OutcomeKind::kTimeout}) {
    if (name == outcome_name(k)) return k;
  }
  return std::nullopt;
}

OutcomeTracker::OutcomeTracker(OutcomeCriteria criteria) : criteria_(std::move(criteria)) {}

void OutcomeTracker::start(double time, double head_x) {
  history_.assign(1, {time, head_x});
}

std::optional<Outcome> OutcomeTracker::update(const OutcomeSample& s) {
  if (over_time_.size() < s.joint_torques.size()) {
    over_time_.resize(s.joint_torques.size(), -1.0);
  }
  std::optional<Outcome> result;
  for (std::size_t i = 0; i < s.joint_torques.size(); ++i) {
    if (std::abs(s.joint_torques[i]) > criteria_.tau_max) {
      // over_time_ holds the elapsed time of the current run, -1 when idle.
      if (over_time_[i] < 0.0 || !last_time_) {
        over_time_[i] = 0.0;
      } else {
        over_time_[i] += s.time - *last_time_;
      }
      if (!result && over_time_[i] >= criteria_.t_over - kTimeTol) {
        std::ostringstream e;
        e << "joint " << i << " cable torque " << s.joint_torques[i]
          << " N m above " << criteria_.tau_max << " N m for " << over_time_[i] << " s";
        result = Outcome{OutcomeKind::kOverload, s.time, e.str()};
      }
    } else {
      over_time_[i] = -1.0;
    }
  }
  last_time_ = s.time;

  history_.emplace_back(s.time, s.head_x);
  const double horizon = s.time - criteria_.stuck_window + kTimeTol;
  while (history_.size() >= 2 && history_[1].first <= horizon) history_.pop_front();

  if (result) return result;
  if (criteria_.far_x && s.head_x > *criteria_.far_x) {
    std::ostringstream e;
    e << "head x " << s.head_x << " m passed far boundary " << *criteria_.far_x << " m";
    return Outcome{OutcomeKind::kSuccess, s.time, e.str()};
  }
  if (criteria_.detect_stuck && history_.front().first <= horizon) {
    const double progress = s.head_x - history_.front().second;
    if (progress < criteria_.progress_eps) {
      std::ostringstream e;
      e << "head x progress " << progress << " m over " << criteria_.stuck_window
        << " s below " << criteria_.progress_eps << " m";
      return Outcome{OutcomeKind::kStuck, s.time, e.str()};
    }
  }
  return std::nullopt;
}

Outcome OutcomeTracker::timeout(double time) const {
  std::ostringstream e;
  e << "no terminal outcome";
  if (!history_.empty()) e << "; final head x " << history_.back().second << " m";
  return Outcome{OutcomeKind::kTimeout, time, e.str()};
}

Outcome classify_outcome(std::vector<OutcomeSample> stream,
                         const OutcomeCriteria& criteria) {
  if (stream.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "outcome stream must be non-empty");
  }
  std::sort(stream.begin(), stream.end(), [](const OutcomeSample& a, const OutcomeSample& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.head_x != b.head_x) return a.head_x < b.head_x;
    return a.joint_torques < b.joint_torques;
  });
  OutcomeTracker tracker(criteria);
  for (const auto& s : stream) {
    if (auto o = tracker.update(s)) return *o;
  }
  const double end = criteria.duration > 0.0 ? criteria.duration : stream.back().time;
  return tracker.timeout(end);
}

}  // namespace anguilla
