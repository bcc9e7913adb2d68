#include "anguilla/hydro.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace anguilla {

namespace {

struct QuadraturePoint {
  double offset;  // fraction of link length from the centre
  double weight;  // fraction of link length
};

constexpr std::array<QuadraturePoint, 3> kSimpson{{
    {-0.5, 1.0 / 6.0},
    {0.0, 4.0 / 6.0},
    {0.5, 1.0 / 6.0},
}};

using Matrix2 = Eigen::Matrix2d;
using Matrix23 = Eigen::Matrix<double, 2, 3>;

/// Per-unit-length resistance tensor Ct t t^T + Cn n n^T.
Matrix2 drag_tensor(double heading, const RobotGeometry& g) {
  const Vec2 t(std::cos(heading), std::sin(heading));
  const Vec2 n = perp(t);
  return g.drag_tangent_Ct * t * t.transpose() +
         g.drag_normal_Cn * n * n.transpose();
}

/// Maps a twist (v of reference point, omega) to the velocity of a point at
/// offset d from the reference.
Matrix23 rigid_map(const Vec2& d) {
  Matrix23 m;
  m << 1.0, 0.0, -d.y(), 0.0, 1.0, d.x();
  return m;
}

template <typename Visit>
void for_each_point(const ChainPose& chain, int link, Visit&& visit) {
  const LinkPose& lp = chain.links[static_cast<std::size_t>(link)];
  const Vec2 axis = lp.axis();
  for (const auto& q : kSimpson) {
    visit(Vec2(lp.center + q.offset * chain.link_length * axis),
          q.weight * chain.link_length);
  }
}

Vec2 shape_velocity(const ChainPose& chain, int link, const Vec2& p,
                    std::span<const double> joint_rates) {
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < link; ++i) {
    v += joint_rates[static_cast<std::size_t>(i)] *
         perp(p - chain.pivots[static_cast<std::size_t>(i)]);
  }
  return v;
}

}  // namespace

LinkWrench link_drag(const LinkPose& pose, const Twist2& velocity,
                     const RobotGeometry& geom, const Vec2& reference) {
  const double length = geom.link_pitch();
  const Matrix2 D = drag_tensor(pose.heading, geom);
  const Vec2 axis = pose.axis();
  const Vec2 v0(velocity.vx, velocity.vy);
  LinkWrench w;
  for (const auto& q : kSimpson) {
    const Vec2 r = pose.center + q.offset * length * axis;
    const Vec2 v = v0 + velocity.omega * perp(r - pose.center);
    const Vec2 f = -(q.weight * length) * (D * v);
    w.force += f;
    w.torque += cross2(r - reference, f);
  }
  return w;
}

LinkWrench link_drag(const LinkPose& pose, const Twist2& velocity,
                     const RobotGeometry& geom) {
  return link_drag(pose, velocity, geom, pose.center);
}

std::vector<LinkWrench> chain_drag(const ChainPose& chain,
                                   const Twist2& head_twist,
                                   std::span<const double> joint_rates,
                                   const RobotGeometry& geom) {
  const auto twists = link_twists(chain, head_twist, joint_rates);
  const Vec2 origin = chain.links.front().center;
  std::vector<LinkWrench> out(chain.links.size());
  for (std::size_t j = 0; j < chain.links.size(); ++j) {
    out[j] = link_drag(chain.links[j], twists[j], geom, origin);
  }
  return out;
}

double distal_drag_torque(const ChainPose& chain, int joint,
                          const Twist2& head_twist,
                          std::span<const double> joint_rates,
                          const RobotGeometry& geom) {
  const Vec2 pivot = chain.pivots[static_cast<std::size_t>(joint)];
  const auto twists = link_twists(chain, head_twist, joint_rates);
  double torque = 0.0;
  for (std::size_t j = static_cast<std::size_t>(joint) + 1; j < chain.links.size(); ++j) {
    torque += link_drag(chain.links[j], twists[j], geom, pivot).torque;
  }
  return torque;
}

Matrix3 resistance_matrix(const ChainPose& chain, const RobotGeometry& geom) {
  const Vec2 origin = chain.links.front().center;
  Matrix3 R = Matrix3::Zero();
  for (int j = 0; j < static_cast<int>(chain.links.size()); ++j) {
    const Matrix2 D = drag_tensor(chain.links[static_cast<std::size_t>(j)].heading, geom);
    for_each_point(chain, j, [&](const Vec2& r, double len) {
      const Matrix23 G = rigid_map(r - origin);
      R.noalias() += len * G.transpose() * D * G;
    });
  }
  return R;
}

Vector3 shape_drag(const ChainPose& chain, std::span<const double> joint_rates,
                   const RobotGeometry& geom) {
  const Vec2 origin = chain.links.front().center;
  Vector3 w = Vector3::Zero();
  for (int j = 1; j < static_cast<int>(chain.links.size()); ++j) {
    const Matrix2 D = drag_tensor(chain.links[static_cast<std::size_t>(j)].heading, geom);
    for_each_point(chain, j, [&](const Vec2& r, double len) {
      const Vec2 f = -len * (D * shape_velocity(chain, j, r, joint_rates));
      w.noalias() += rigid_map(r - origin).transpose() * f;
    });
  }
  return w;
}

Twist2 solve_body_velocity(const ChainPose& chain,
                           std::span<const double> joint_rates,
                           std::span<const LinkWrench> external,
                           const RobotGeometry& geom) {
  const Matrix3 R = resistance_matrix(chain, geom);
  Vector3 rhs = shape_drag(chain, joint_rates, geom);
  for (const auto& w : external) rhs += to_vector(w);
  const Eigen::LLT<Matrix3> llt(R);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kDiverged, "singular drag resistance matrix");
  }
  return to_twist(llt.solve(rhs));
}

Pose2 integrate_pose(const Pose2& pose, const Twist2& twist, double dt) {
  return {pose.x + dt * twist.vx, pose.y + dt * twist.vy,
          pose.heading + dt * twist.omega};
}

RobotState step_planar(const RobotState& state,
                       std::span<const double> resolved_angles,
                       std::span<const double> resolved_rates,
                       std::span<const LinkWrench> external,
                       const RobotGeometry& geom, double dt) {
  const ChainPose chain = forward_kinematics(state.head_pose, resolved_angles, geom);
  const Twist2 twist = solve_body_velocity(chain, resolved_rates, external, geom);
  return advance_planar(state, resolved_angles, resolved_rates, twist, dt);
}

RobotState advance_planar(const RobotState& state,
                          std::span<const double> resolved_angles,
                          std::span<const double> resolved_rates,
                          const Twist2& body_twist, double dt) {
  if (!(dt > 0.0 && dt <= 0.02)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must lie in (0, 0.02] s");
  }
  RobotState next = state;
  next.head_pose = integrate_pose(state.head_pose, body_twist, dt);
  next.joint_angles.assign(resolved_angles.begin(), resolved_angles.end());
  next.joint_velocities.assign(resolved_rates.begin(), resolved_rates.end());
  next.body_twist = body_twist;
  next.sim_time = state.sim_time + dt;

  bool finite = std::isfinite(next.head_pose.x) && std::isfinite(next.head_pose.y) &&
                std::isfinite(next.head_pose.heading);
  for (double a : next.joint_angles) finite = finite && std::isfinite(a);
  for (double r : next.joint_velocities) finite = finite && std::isfinite(r);
  if (!finite) {
    throw Error(ErrorCode::kDiverged, "planar step produced a non-finite state");
  }
  return next;
}

}  // namespace anguilla
