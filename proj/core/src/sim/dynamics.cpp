#include "gatenav/sim/dynamics.hpp"

#include <cmath>

#include "gatenav/common/error.hpp"

namespace gatenav::sim {

DroneState step(const DroneState& state, const VelocityCommand& cmd, double dt) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  DroneState next = state;
  next.position += yaw_rotate(state.yaw, Vec3{cmd.vx, cmd.vy, cmd.vz}) * dt;
  next.yaw = wrap_angle(state.yaw + cmd.vpsi * dt);
  next.time = state.time + dt;
  return next;
}

VelocityCommand CommandFilter::apply(const VelocityCommand& cmd, double dt) {
  const double alpha = tau_ <= 0.0 ? 1.0 : 1.0 - std::exp(-dt / tau_);
  state_.vx += alpha * (cmd.vx - state_.vx);
  state_.vy += alpha * (cmd.vy - state_.vy);
  state_.vz += alpha * (cmd.vz - state_.vz);
  state_.vpsi += alpha * (cmd.vpsi - state_.vpsi);
  return state_;
}

}  // namespace gatenav::sim
