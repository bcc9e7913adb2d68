#include "anguilla/gait.hpp"

#include <cmath>
#include <string>

namespace anguilla {

double suggested_angle(const GaitParams& p, int joint_index, double t) {
  if (joint_index < 0 || joint_index >= p.joint_count_N) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint index " + std::to_string(joint_index) +
                    " out of range for " + std::to_string(p.joint_count_N) +
                    " joints");
  }
  if (!(t >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gait time must be >= 0");
  }
  const double spatial = 2.0 * kPi * p.spatial_freq_xi * joint_index /
                         static_cast<double>(p.joint_count_N);
  const double temporal = 2.0 * kPi * p.temporal_freq_omega * t;
  return p.amplitude_A * std::sin(spatial - temporal) + p.offset_phi;
}

std::vector<double> suggested_profile(const GaitParams& p, double t) {
  std::vector<double> out(static_cast<std::size_t>(p.joint_count_N));
  for (int i = 0; i < p.joint_count_N; ++i) {
    out[static_cast<std::size_t>(i)] = suggested_angle(p, i, t);
  }
  return out;
}

double joint_phase_lag(const GaitParams& p) {
  return 2.0 * kPi * p.spatial_freq_xi / static_cast<double>(p.joint_count_N);
}

}  // namespace anguilla
