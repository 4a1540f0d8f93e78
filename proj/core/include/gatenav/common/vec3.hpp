#pragma once

#include <cmath>

namespace gatenav {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Rotation about world z by yaw: body (x fwd, y left, z up) -> world.
inline Vec3 yaw_rotate(double yaw, const Vec3& v) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

// Inverse of yaw_rotate.
inline Vec3 yaw_unrotate(double yaw, const Vec3& v) { return yaw_rotate(-yaw, v); }

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

}  // namespace gatenav
