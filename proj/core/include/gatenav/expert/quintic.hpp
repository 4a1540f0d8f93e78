#pragma once

#include <array>

#include "gatenav/common/vec3.hpp"

namespace gatenav::expert {

struct BoundaryState {
  Vec3 pos;
  Vec3 vel;
  Vec3 acc;
};

// Per-axis quintic polynomial over [0, T]. With position/velocity/
// acceleration pinned at both ends this is the minimum-jerk trajectory.
struct QuinticSegment {
  std::array<std::array<double, 6>, 3> coeffs{};  // x, y, z
  double duration = 0.0;
  double start_time = 0.0;

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
  // Integral of squared jerk over the segment.
  double jerk_integral() const;
};

// Solves the per-axis 6x6 boundary-condition system for p/v/a at t=0 and
// p/v (goal acceleration zero) at t=T. Throws DomainError-style ConfigError
// for T <= 0.
QuinticSegment plan_min_jerk(const BoundaryState& start, const Vec3& goal_pos, const Vec3& goal_vel, double duration);

}  // namespace gatenav::expert
