#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "anguilla/hydro.hpp"

using namespace anguilla;

namespace {

// Fine midpoint-rule integration of the per-length drag along one link.
LinkWrench brute_link_drag(const LinkPose& pose, const Twist2& v, const RobotGeometry& g,
                           const Vec2& ref) {
  const int n = 4000;
  const double L = g.link_pitch();
  const Vec2 t = pose.axis();
  const Vec2 nrm = perp(t);
  LinkWrench w;
  for (int k = 0; k < n; ++k) {
    const double s = -0.5 * L + (k + 0.5) * L / n;
    const Vec2 p = pose.center + s * t;
    const Vec2 vel = Vec2(v.vx, v.vy) + v.omega * perp(p - pose.center);
    const Vec2 f = -g.drag_tangent_Ct * vel.dot(t) * t - g.drag_normal_Cn * vel.dot(nrm) * nrm;
    w.force += f * (L / n);
    w.torque += cross2(p - ref, f) * (L / n);
  }
  return w;
}

Vec2 rotate(const Vec2& v, double a) {
  return {std::cos(a) * v.x() - std::sin(a) * v.y(), std::sin(a) * v.x() + std::cos(a) * v.y()};
}

}  // namespace

TEST_CASE("zero velocity gives zero drag") {
  const RobotGeometry g;
  const auto w = link_drag({Vec2(0.3, 0.1), 0.4}, {}, g);
  CHECK(w.force.norm() == 0.0);
  CHECK(w.torque == 0.0);
}

TEST_CASE("tangential and normal unit motion") {
  const RobotGeometry g;
  const double L = g.link_pitch();
  const LinkPose pose{Vec2::Zero(), 0.0};
  const auto t = link_drag(pose, {1, 0, 0}, g);
  const auto n = link_drag(pose, {0, 1, 0}, g);
  CHECK(t.force.x() == doctest::Approx(-g.drag_tangent_Ct * L));
  CHECK(t.force.y() == doctest::Approx(0.0));
  CHECK(n.force.y() == doctest::Approx(-g.drag_normal_Cn * L));
  CHECK(n.force.norm() / t.force.norm() == doctest::Approx(g.drag_normal_Cn / g.drag_tangent_Ct));
}

TEST_CASE("link drag matches fine quadrature") {
  const RobotGeometry g;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LinkPose pose{Vec2(u(rng), u(rng)), 3 * u(rng)};
    const Twist2 v{u(rng), u(rng), 4 * u(rng)};
    const Vec2 ref(u(rng), u(rng));
    const auto a = link_drag(pose, v, g, ref);
    const auto b = brute_link_drag(pose, v, g, ref);
    CHECK(a.force.x() == doctest::Approx(b.force.x()).epsilon(1e-6));
    CHECK(a.force.y() == doctest::Approx(b.force.y()).epsilon(1e-6));
    CHECK(a.torque == doctest::Approx(b.torque).epsilon(1e-6));
  }
}

TEST_CASE("drag is dissipative") {
  const RobotGeometry g;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> q{u(rng), u(rng), u(rng)};
    const std::vector<double> qd{3 * u(rng), 3 * u(rng), 3 * u(rng)};
    const Twist2 head{u(rng), u(rng), 2 * u(rng)};
    const auto chain = forward_kinematics({u(rng), u(rng), 3 * u(rng)}, q, g);
    const auto twists = link_twists(chain, head, qd);
    double power = 0.0;
    for (std::size_t i = 0; i < chain.links.size(); ++i) {
      const auto w = link_drag(chain.links[i], twists[i], g);
      power += w.force.dot(Vec2(twists[i].vx, twists[i].vy)) + w.torque * twists[i].omega;
    }
    CHECK(power <= 0.0);
    const Matrix3 R = resistance_matrix(chain, g);
    CHECK((R - R.transpose()).norm() < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix3>(R).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("resistance matrix agrees with chain drag") {
  const RobotGeometry g;
  const std::vector<double> q{0.3, -0.2, 0.5};
  const std::vector<double> zero{0, 0, 0};
  const auto chain = forward_kinematics({0.2, -0.1, 0.4}, q, g);
  const Twist2 v{0.1, -0.3, 0.8};
  Vector3 total = Vector3::Zero();
  for (const auto& w : chain_drag(chain, v, zero, g)) total += to_vector(w);
  const Vector3 expect = -resistance_matrix(chain, g) * to_vector(v);
  CHECK((total - expect).norm() < 1e-12);
}

TEST_CASE("no shape change and no load gives no motion") {
  const RobotGeometry g;
  const std::vector<double> q{0.3, -0.2, 0.5};
  const std::vector<double> zero{0, 0, 0};
  const auto chain = forward_kinematics({}, q, g);
  const auto t = solve_body_velocity(chain, zero, {}, g);
  CHECK(std::abs(t.vx) < 1e-15);
  CHECK(std::abs(t.vy) < 1e-15);
  CHECK(std::abs(t.omega) < 1e-15);
}

TEST_CASE("fore-aft symmetric bending of a straight body neither surges nor yaws") {
  const RobotGeometry g;
  const std::vector<double> q{0, 0, 0};
  // Reversing the chain maps joint i to joint N-1-i with the same sign, so
  // the mean link surge and the mean link spin both vanish.
  const std::vector<double> qd{0.8, 0.3, 0.8};
  const auto chain = forward_kinematics({}, q, g);
  const auto t = solve_body_velocity(chain, qd, {}, g);
  double vx = 0.0, w = 0.0;
  for (const auto& l : link_twists(chain, t, qd)) {
    vx += l.vx;
    w += l.omega;
  }
  CHECK(std::abs(vx) < 1e-12);
  CHECK(std::abs(w) < 1e-12);
}

TEST_CASE("mirrored shape rates mirror the body velocity") {
  const RobotGeometry g;
  const std::vector<double> q{0, 0, 0};
  const std::vector<double> qd{0.4, -1.1, 0.7};
  const std::vector<double> mirrored{-0.4, 1.1, -0.7};
  const auto chain = forward_kinematics({}, q, g);
  const auto a = solve_body_velocity(chain, qd, {}, g);
  const auto b = solve_body_velocity(chain, mirrored, {}, g);
  CHECK(b.vx == doctest::Approx(a.vx));
  CHECK(b.vy == doctest::Approx(-a.vy));
  CHECK(b.omega == doctest::Approx(-a.omega));
}

TEST_CASE("body velocity is frame invariant") {
  const RobotGeometry g;
  const std::vector<double> q{0.3, -0.5, 0.2};
  const std::vector<double> qd{0.6, 0.9, -1.2};
  const auto a = solve_body_velocity(forward_kinematics({0, 0, 0}, q, g), qd, {}, g);
  for (double rot : {0.7, -2.1, kPi}) {
    const auto b = solve_body_velocity(forward_kinematics({1.3, -0.4, rot}, q, g), qd, {}, g);
    const Vec2 va = rotate(Vec2(a.vx, a.vy), rot);
    CHECK(b.vx == doctest::Approx(va.x()));
    CHECK(b.vy == doctest::Approx(va.y()));
    CHECK(b.omega == doctest::Approx(a.omega));
  }
}

TEST_CASE("uniform drag scaling leaves free swimming unchanged") {
  RobotGeometry g;
  const std::vector<double> q{0.3, -0.5, 0.2};
  const std::vector<double> qd{0.6, 0.9, -1.2};
  const auto a = solve_body_velocity(forward_kinematics({}, q, g), qd, {}, g);
  g.drag_normal_Cn *= 3.0;
  g.drag_tangent_Ct *= 3.0;
  const auto b = solve_body_velocity(forward_kinematics({}, q, g), qd, {}, g);
  CHECK(b.vx == doctest::Approx(a.vx));
  CHECK(b.vy == doctest::Approx(a.vy));
  CHECK(b.omega == doctest::Approx(a.omega));
}

TEST_CASE("external wrench balances drag") {
  const RobotGeometry g;
  const std::vector<double> q{0.1, 0.2, -0.1};
  const std::vector<double> zero{0, 0, 0};
  const auto chain = forward_kinematics({}, q, g);
  std::vector<LinkWrench> ext(4);
  ext[2].force = Vec2(0.3, -0.1);
  ext[2].torque = 0.05;
  const auto t = solve_body_velocity(chain, zero, ext, g);
  Vector3 total = to_vector(ext[2]);
  for (const auto& w : chain_drag(chain, t, zero, g)) total += to_vector(w);
  CHECK(total.norm() < 1e-12);
}

TEST_CASE("pose integration") {
  Pose2 p{0.5, -0.5, 0.25};
  const Pose2 still = integrate_pose(p, {}, 0.01);
  CHECK(still == p);
  Pose2 q{};
  for (int k = 0; k < 10; ++k) q = integrate_pose(q, {1, 0, 0}, 0.01);
  CHECK(q.x == doctest::Approx(0.1));
  CHECK(q.y == doctest::Approx(0.0));
}

TEST_CASE("non-finite planar step diverges and leaves state alone") {
  const RobotGeometry g;
  const RobotState s = make_state(g, {}, {0, 0, 0}, 0.0, {0.5, 0.5, 0.5, 0.5});
  const std::vector<double> a{0, 0, 0};
  const std::vector<double> r{std::nan(""), 0, 0};
  try {
    step_planar(s, a, r, {}, g, 0.005);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDiverged);
  }
}
