#pragma once

#include <vector>

#include "gatenav/common/vec3.hpp"
#include "gatenav/numerics/rng.hpp"

namespace gatenav::sim {

struct GatePlacement {
  Vec3 nominal_center;     // on the nominal circle
  Vec3 offset;             // per-axis within [-amplitude, amplitude]
  double facing_yaw = 0.0; // travel direction through the gate (tangent)
  int traversal_count = 0;

  // Vertical offsets may lower a gate toward but never below 0.5 m.
  Vec3 center() const {
    Vec3 c = nominal_center + offset;
    c.z = std::max(c.z, 0.5);
    return c;
  }
};

struct TrackConfig {
  std::vector<GatePlacement> gates;  // ordered ring
  double amplitude = 0.0;            // offset amplitude, meters
  double altitude = 2.0;             // nominal gate height, meters
  double circumference = 50.0;       // nominal track length, meters

  double radius() const { return circumference / (2.0 * M_PI); }
};

// Eight gates evenly spaced on the nominal circle (counter-clockwise travel),
// facing yaw tangent to the circle, initial offsets uniform in [-a, a]^3.
TrackConfig make_track(Rng& rng, double amplitude, double circumference = 50.0, double altitude = 2.0,
                       int gate_count = 8);

// Draws a fresh offset for one gate (after a traversal).
void resample_gate_offset(TrackConfig& track, int gate_index, Rng& rng);

}  // namespace gatenav::sim
