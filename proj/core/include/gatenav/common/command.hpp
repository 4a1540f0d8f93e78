#pragma once

#include <algorithm>
#include <array>

namespace gatenav {

// Body-frame velocity command: linear (m/s) plus yaw rate (rad/s).
struct VelocityCommand {
  double vx = 0.0, vy = 0.0, vz = 0.0;
  double vpsi = 0.0;
};

struct CommandLimits {
  double v_max = 3.0;      // per-axis linear bound, m/s
  double omega_max = 1.5;  // yaw rate bound, rad/s
};

inline VelocityCommand clamp_command(const VelocityCommand& c, const CommandLimits& lim) {
  return {std::clamp(c.vx, -lim.v_max, lim.v_max), std::clamp(c.vy, -lim.v_max, lim.v_max),
          std::clamp(c.vz, -lim.v_max, lim.v_max), std::clamp(c.vpsi, -lim.omega_max, lim.omega_max)};
}

// Clamped command scaled into [-1,1]^4.
inline std::array<double, 4> normalize_command(const VelocityCommand& c, const CommandLimits& lim) {
  const VelocityCommand k = clamp_command(c, lim);
  return {k.vx / lim.v_max, k.vy / lim.v_max, k.vz / lim.v_max, k.vpsi / lim.omega_max};
}

inline VelocityCommand denormalize_command(const std::array<double, 4>& n, const CommandLimits& lim) {
  return {n[0] * lim.v_max, n[1] * lim.v_max, n[2] * lim.v_max, n[3] * lim.omega_max};
}

}  // namespace gatenav
