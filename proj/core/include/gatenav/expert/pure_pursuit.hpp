#pragma once

#include "gatenav/common/command.hpp"
#include "gatenav/expert/quintic.hpp"
#include "gatenav/sim/dynamics.hpp"

namespace gatenav::expert {

struct PurePursuitConfig {
  double lookahead = 1.5;   // meters of arc along the reference path
  double v_nominal = 2.0;   // commanded speed toward the lookahead point
  double k_psi = 1.5;       // yaw-rate gain on bearing error
  CommandLimits limits;
  int path_samples = 256;   // arc discretization per segment
};

// Finds the earliest path point at arc distance >= lookahead ahead of the
// point closest to the drone (falling back to the segment end) and commands
// body-frame velocity toward it; vpsi = k_psi * wrap(bearing - yaw). All
// components are clamped to the limits.
VelocityCommand pure_pursuit(const sim::DroneState& state, const QuinticSegment& segment,
                             const PurePursuitConfig& cfg);

}  // namespace gatenav::expert
