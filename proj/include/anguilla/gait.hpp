#pragma once

#include <vector>

#include "anguilla/model.hpp"

namespace anguilla {

/// Serpenoid traveling-wave template for joint `joint_index` at simulation
/// time `t`:  A sin(2 pi xi i / N - 2 pi omega t) + phi.
/// Joint 0 is nearest the head; the wave travels head to tail.
double suggested_angle(const GaitParams& p, int joint_index, double t);

std::vector<double> suggested_profile(const GaitParams& p, double t);

/// Phase lag between consecutive joints, 2 pi xi / N.
double joint_phase_lag(const GaitParams& p);

}  // namespace anguilla
