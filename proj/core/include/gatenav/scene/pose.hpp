#pragma once

#include "gatenav/common/vec3.hpp"

namespace gatenav::scene {

// Relative pose of the next gate in the drone body frame (x forward, y left,
// z up): spherical distance/azimuth/polar plus the gate's yaw relative to the
// body heading. Azimuth is positive to the left; polar is measured from +z,
// so looking level at the gate gives phi ~ pi/2.
struct RelativeGatePose {
  double r = 1.0;      // meters, > 0
  double theta = 0.0;  // radians, (-pi, pi]
  double phi = M_PI / 2.0;  // radians, (0, pi)
  double psi = 0.0;    // radians, (-pi, pi], relative gate yaw
};

// Body-frame unit conversion: x = r sin(phi) cos(theta), y = r sin(phi)
// sin(theta), z = r cos(phi).
Vec3 spherical_to_cartesian(const RelativeGatePose& p);

// Inverse mapping; psi = wrap(gate_yaw_world - body_yaw). The polar angle is
// clamped away from the poles. Throws DataError on the zero vector.
RelativeGatePose cartesian_to_spherical(const Vec3& v, double gate_yaw_world, double body_yaw);

}  // namespace gatenav::scene
