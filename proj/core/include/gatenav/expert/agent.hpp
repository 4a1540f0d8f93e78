#pragma once

#include "gatenav/expert/pure_pursuit.hpp"
#include "gatenav/expert/quintic.hpp"
#include "gatenav/sim/rollout.hpp"

namespace gatenav::expert {

// The expert policy: plans a minimum-jerk segment to the current target gate
// (one-gate horizon, replanned at each traversal) and tracks it with pure
// pursuit. Operates on full state, never on images.
class ExpertAgent : public sim::Agent {
 public:
  struct Config {
    PurePursuitConfig pursuit;
    double v_cross = 1.5;       // crossing speed along the gate normal, m/s
    double min_duration = 0.25; // floor on segment duration, seconds
  };

  ExpertAgent() : cfg_() {}
  explicit ExpertAgent(const Config& cfg) : cfg_(cfg) {}

  bool wants_image() const override { return false; }
  void reset(const sim::TrackConfig& track, const sim::DroneState& state, const Vec3& vel_world) override;
  void on_traversal(const sim::TrackConfig& track, int new_target, const sim::DroneState& state,
                    const Vec3& vel_world) override;
  VelocityCommand act(const sim::AgentContext& ctx) override;

  const QuinticSegment& segment() const { return segment_; }
  const Config& config() const { return cfg_; }

 private:
  void replan(const sim::TrackConfig& track, int target, const sim::DroneState& state, const Vec3& vel_world);

  Config cfg_;
  QuinticSegment segment_;
};

}  // namespace gatenav::expert
