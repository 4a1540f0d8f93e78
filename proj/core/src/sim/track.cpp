#include "gatenav/sim/track.hpp"

#include "gatenav/common/error.hpp"

namespace gatenav::sim {

TrackConfig make_track(Rng& rng, double amplitude, double circumference, double altitude, int gate_count) {
  if (amplitude < 0.0) throw ConfigError("make_track: amplitude must be >= 0");
  if (gate_count < 1) throw ConfigError("make_track: need at least one gate");
  TrackConfig track;
  track.amplitude = amplitude;
  track.altitude = altitude;
  track.circumference = circumference;
  const double radius = track.radius();
  track.gates.resize(static_cast<size_t>(gate_count));
  for (int g = 0; g < gate_count; ++g) {
    const double angle = 2.0 * M_PI * g / gate_count;
    GatePlacement& gate = track.gates[static_cast<size_t>(g)];
    gate.nominal_center = {radius * std::cos(angle), radius * std::sin(angle), altitude};
    gate.facing_yaw = wrap_angle(angle + M_PI / 2.0);  // tangent, counter-clockwise travel
    gate.offset = {rng.uniform(-amplitude, amplitude), rng.uniform(-amplitude, amplitude),
                   rng.uniform(-amplitude, amplitude)};
  }
  return track;
}

void resample_gate_offset(TrackConfig& track, int gate_index, Rng& rng) {
  GatePlacement& gate = track.gates.at(static_cast<size_t>(gate_index));
  const double a = track.amplitude;
  gate.offset = {rng.uniform(-a, a), rng.uniform(-a, a), rng.uniform(-a, a)};
}

}  // namespace gatenav::sim
