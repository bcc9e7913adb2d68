#include <doctest.h>

#include <cmath>

#include "anguilla/gait.hpp"

using namespace anguilla;

namespace {

GaitParams straight_gait() {
  GaitParams p;
  p.amplitude_A = deg_to_rad(30);
  p.spatial_freq_xi = 0.5;
  p.temporal_freq_omega = 0.2;
  p.offset_phi = 0.0;
  p.joint_count_N = 3;
  return p;
}

}  // namespace

TEST_CASE("serpenoid reference values") {
  const auto p = straight_gait();
  CHECK(suggested_angle(p, 0, 0.0) == doctest::Approx(0.0));
  CHECK(rad_to_deg(suggested_angle(p, 1, 0.0)) == doctest::Approx(30.0 * std::sin(kPi / 3)));
  CHECK(rad_to_deg(suggested_angle(p, 1, 0.0)) == doctest::Approx(25.98).epsilon(1e-3));
  // Quarter period: sin(-pi/2) = -1 at the head joint.
  CHECK(suggested_angle(p, 0, 1.25) == doctest::Approx(-p.amplitude_A));
}

TEST_CASE("offset shifts every joint") {
  auto p = straight_gait();
  auto q = p;
  q.offset_phi = deg_to_rad(20);
  for (double t : {0.0, 0.7, 3.3}) {
    const auto a = suggested_profile(p, t);
    const auto b = suggested_profile(q, t);
    for (int i = 0; i < 3; ++i) CHECK(b[i] - a[i] == doctest::Approx(deg_to_rad(20)));
  }
}

TEST_CASE("half period negates the profile") {
  const auto p = straight_gait();
  for (double t : {0.0, 0.4, 2.1, 7.9}) {
    const auto a = suggested_profile(p, t);
    const auto b = suggested_profile(p, t + 0.5 / p.temporal_freq_omega);
    for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(-a[i]).epsilon(1e-12));
  }
}

TEST_CASE("periodicity, boundedness and phase lag") {
  GaitParams p;
  p.amplitude_A = deg_to_rad(50);
  p.spatial_freq_xi = 0.6;
  p.temporal_freq_omega = 0.1;
  p.offset_phi = deg_to_rad(-10);
  const double T = p.period();
  const double lag = joint_phase_lag(p);
  CHECK(lag == doctest::Approx(2 * kPi * 0.6 / 3));
  for (int k = 0; k < 400; ++k) {
    const double t = 0.037 * k;
    for (int i = 0; i < 3; ++i) {
      const double a = suggested_angle(p, i, t);
      CHECK(std::abs(a - p.offset_phi) <= p.amplitude_A + 1e-12);
      CHECK(suggested_angle(p, i, t + T) == doctest::Approx(a).epsilon(1e-9));
    }
    // Joint i+1 leads joint i by the lag: the same phase is reached lag /
    // (2 pi omega) later at the next joint.
    const double dt_lag = lag / (2 * kPi * p.temporal_freq_omega);
    CHECK(suggested_angle(p, 1, t + dt_lag) == doctest::Approx(suggested_angle(p, 0, t)).epsilon(1e-9));
  }
}

TEST_CASE("gait arguments are checked") {
  const auto p = straight_gait();
  CHECK_THROWS_AS(suggested_angle(p, 3, 0.0), Error);
  CHECK_THROWS_AS(suggested_angle(p, -1, 0.0), Error);
  CHECK_THROWS_AS(suggested_angle(p, 0, -1.0), Error);
  auto bad = p;
  bad.temporal_freq_omega = 0.0;
  CHECK_FALSE(check_gait(bad).empty());
  CHECK(check_gait(p).empty());
}
