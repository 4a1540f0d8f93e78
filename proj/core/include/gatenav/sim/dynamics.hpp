#pragma once

#include "gatenav/common/command.hpp"
#include "gatenav/common/vec3.hpp"

namespace gatenav::sim {

struct DroneState {
  Vec3 position;     // world frame, meters
  double yaw = 0.0;  // radians, kept in (-pi, pi]
  double time = 0.0; // seconds
};

// Pure kinematic step: position += R_yaw * v_body * dt, yaw += vpsi * dt
// (wrapped). Velocity smoothing is applied by the caller through
// CommandFilter before stepping.
DroneState step(const DroneState& state, const VelocityCommand& cmd, double dt);

// First-order response to commanded velocity with time constant tau;
// tau <= 0 passes commands through unchanged.
class CommandFilter {
 public:
  explicit CommandFilter(double tau = 0.2) : tau_(tau) {}

  VelocityCommand apply(const VelocityCommand& cmd, double dt);
  const VelocityCommand& current() const { return state_; }
  void reset(const VelocityCommand& v = {}) { state_ = v; }

 private:
  double tau_;
  VelocityCommand state_;
};

}  // namespace gatenav::sim
