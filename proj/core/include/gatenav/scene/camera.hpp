#pragma once

#include <cmath>

#include "gatenav/common/error.hpp"

namespace gatenav::scene {

// Pinhole camera looking along body +x; u grows to the right (-y), v grows
// downward (-z). Square pixels; the vertical FOV follows from the aspect
// ratio.
struct CameraIntrinsics {
  int width = 32;
  int height = 32;
  double hfov = 1.0471975511965976;  // 60 deg

  double fx() const { return (width / 2.0) / std::tan(hfov / 2.0); }
  double fy() const { return fx(); }
  double cx() const { return width / 2.0; }
  double cy() const { return height / 2.0; }
  double vfov() const { return 2.0 * std::atan(std::tan(hfov / 2.0) * height / static_cast<double>(width)); }

  void validate() const {
    if (width < 8 || height < 8) throw ConfigError("camera: width and height must be >= 8");
    if (!(hfov > 0.0 && hfov < M_PI)) throw ConfigError("camera: hfov must lie in (0, pi)");
  }
};

}  // namespace gatenav::scene
