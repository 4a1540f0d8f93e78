#include "gatenav/expert/quintic.hpp"

#include <Eigen/Dense>

#include "gatenav/common/error.hpp"

namespace gatenav::expert {

Vec3 QuinticSegment::position(double t) const {
  Vec3 p;
  double* out[3] = {&p.x, &p.y, &p.z};
  for (int a = 0; a < 3; ++a) {
    const auto& c = coeffs[static_cast<size_t>(a)];
    double acc = 0.0;
    for (int k = 5; k >= 0; --k) acc = acc * t + c[static_cast<size_t>(k)];
    *out[a] = acc;
  }
  return p;
}

Vec3 QuinticSegment::velocity(double t) const {
  Vec3 v;
  double* out[3] = {&v.x, &v.y, &v.z};
  for (int a = 0; a < 3; ++a) {
    const auto& c = coeffs[static_cast<size_t>(a)];
    double acc = 0.0;
    for (int k = 5; k >= 1; --k) acc = acc * t + k * c[static_cast<size_t>(k)];
    *out[a] = acc;
  }
  return v;
}

Vec3 QuinticSegment::acceleration(double t) const {
  Vec3 a;
  double* out[3] = {&a.x, &a.y, &a.z};
  for (int ax = 0; ax < 3; ++ax) {
    const auto& c = coeffs[static_cast<size_t>(ax)];
    double acc = 0.0;
    for (int k = 5; k >= 2; --k) acc = acc * t + k * (k - 1) * c[static_cast<size_t>(k)];
    *out[ax] = acc;
  }
  return a;
}

double QuinticSegment::jerk_integral() const {
  // jerk(t) = 6 c3 + 24 c4 t + 60 c5 t^2; integrate its square analytically.
  double total = 0.0;
  const double T = duration;
  for (int a = 0; a < 3; ++a) {
    const auto& c = coeffs[static_cast<size_t>(a)];
    const double j0 = 6.0 * c[3], j1 = 24.0 * c[4], j2 = 60.0 * c[5];
    total += j0 * j0 * T + j0 * j1 * T * T + (j1 * j1 + 2.0 * j0 * j2) * T * T * T / 3.0 +
             j1 * j2 * T * T * T * T / 2.0 + j2 * j2 * T * T * T * T * T / 5.0;
  }
  return total;
}

QuinticSegment plan_min_jerk(const BoundaryState& start, const Vec3& goal_pos, const Vec3& goal_vel,
                             double duration) {
  if (!(duration > 0.0)) throw ConfigError("plan_min_jerk: duration must be positive");
  const double T = duration;
  Eigen::Matrix<double, 6, 6> A;
  A.setZero();
  // p(0), v(0), a(0)
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  A(2, 2) = 2.0;
  // p(T), v(T), a(T)
  double tp = 1.0;
  for (int k = 0; k < 6; ++k) {
    A(3, k) = tp;
    A(4, k) = k == 0 ? 0.0 : k * tp / T;
    A(5, k) = k < 2 ? 0.0 : static_cast<double>(k) * (k - 1) * tp / (T * T);
    tp *= T;
  }
  const Eigen::PartialPivLU<Eigen::Matrix<double, 6, 6>> lu(A);

  QuinticSegment seg;
  seg.duration = T;
  const double s0[3] = {start.pos.x, start.pos.y, start.pos.z};
  const double v0[3] = {start.vel.x, start.vel.y, start.vel.z};
  const double a0[3] = {start.acc.x, start.acc.y, start.acc.z};
  const double s1[3] = {goal_pos.x, goal_pos.y, goal_pos.z};
  const double v1[3] = {goal_vel.x, goal_vel.y, goal_vel.z};
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Matrix<double, 6, 1> rhs;
    rhs << s0[axis], v0[axis], a0[axis], s1[axis], v1[axis], 0.0;
    const Eigen::Matrix<double, 6, 1> c = lu.solve(rhs);
    for (int k = 0; k < 6; ++k) seg.coeffs[static_cast<size_t>(axis)][static_cast<size_t>(k)] = c(k);
  }
  return seg;
}

}  // namespace gatenav::expert
