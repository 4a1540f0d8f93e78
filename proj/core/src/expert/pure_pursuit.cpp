#include "gatenav/expert/pure_pursuit.hpp"

#include <vector>

#include "gatenav/common/error.hpp"

namespace gatenav::expert {

VelocityCommand pure_pursuit(const sim::DroneState& state, const QuinticSegment& segment,
                             const PurePursuitConfig& cfg) {
  if (!(cfg.lookahead > 0.0)) throw ConfigError("pure_pursuit: lookahead must be positive");
  const int n = std::max(2, cfg.path_samples);

  std::vector<Vec3> pts(static_cast<size_t>(n + 1));
  for (int i = 0; i <= n; ++i)
    pts[static_cast<size_t>(i)] = segment.position(segment.duration * i / static_cast<double>(n));

  size_t closest = 0;
  double best = (pts[0] - state.position).norm();
  for (size_t i = 1; i < pts.size(); ++i) {
    const double d = (pts[i] - state.position).norm();
    if (d < best) {
      best = d;
      closest = i;
    }
  }

  Vec3 target = pts.back();
  double arc = 0.0;
  for (size_t i = closest + 1; i < pts.size(); ++i) {
    arc += (pts[i] - pts[i - 1]).norm();
    if (arc >= cfg.lookahead) {
      target = pts[i];
      break;
    }
  }

  const Vec3 to_target = target - state.position;
  VelocityCommand cmd;
  const double dist = to_target.norm();
  if (dist > 1e-9) {
    const Vec3 v_world = to_target * (cfg.v_nominal / dist);
    const Vec3 v_body = yaw_unrotate(state.yaw, v_world);
    cmd.vx = v_body.x;
    cmd.vy = v_body.y;
    cmd.vz = v_body.z;
    const double bearing = std::atan2(to_target.y, to_target.x);
    cmd.vpsi = cfg.k_psi * wrap_angle(bearing - state.yaw);
  }
  return clamp_command(cmd, cfg.limits);
}

}  // namespace gatenav::expert
