#include "gatenav/scene/pose.hpp"

#include <algorithm>

#include "gatenav/common/error.hpp"

namespace gatenav::scene {

Vec3 spherical_to_cartesian(const RelativeGatePose& p) {
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  return {p.r * sp * std::cos(p.theta), p.r * sp * std::sin(p.theta), p.r * cp};
}

RelativeGatePose cartesian_to_spherical(const Vec3& v, double gate_yaw_world, double body_yaw) {
  const double r = v.norm();
  if (r <= 0.0) throw DataError("cartesian_to_spherical: zero vector has no direction");
  RelativeGatePose p;
  p.r = r;
  p.theta = std::atan2(v.y, v.x);
  constexpr double kPoleEps = 1e-9;
  p.phi = std::clamp(std::acos(std::clamp(v.z / r, -1.0, 1.0)), kPoleEps, M_PI - kPoleEps);
  p.psi = wrap_angle(gate_yaw_world - body_yaw);
  return p;
}

}  // namespace gatenav::scene
