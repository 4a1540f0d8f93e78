#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "gatenav/common/command.hpp"
#include "gatenav/numerics/rng.hpp"
#include "gatenav/numerics/tensor.hpp"
#include "gatenav/scene/render.hpp"
#include "gatenav/sim/dynamics.hpp"
#include "gatenav/sim/track.hpp"

namespace gatenav::sim {

enum class Termination { kCompleted, kCollision, kTimeout, kMissedGate };
std::string termination_name(Termination t);

enum class TraversalOutcome { kNone, kTraversed, kCollided };

// Classifies the motion segment prev->curr against one gate: crossing the
// plane front-to-back inside the inner aperture (half side = side/2 - bar)
// is a traversal, inside the outer square but on the frame bars a collision,
// anything else none.
TraversalOutcome check_traversal(const Vec3& prev, const Vec3& curr, const GatePlacement& gate, double gate_side,
                                 double bar_thickness);

struct TickLog {
  double t = 0.0;
  Vec3 position;
  double yaw = 0.0;
  VelocityCommand cmd;  // as commanded by the agent (pre-filter)
  int target_gate = 0;
};

struct EpisodeRecord {
  std::vector<TickLog> ticks;  // populated when record_trace is set
  int ticks_run = 0;
  int gates_traversed = 0;
  Termination termination = Termination::kTimeout;
  double score = 0.0;  // min(gates_traversed, total) / total
};

struct AgentContext {
  const DroneState& state;
  Vec3 velocity_world;  // applied velocity, world frame
  const TrackConfig& track;
  int target_gate = 0;
  const Tensor* image = nullptr;  // onboard view if requested
};

class Agent {
 public:
  virtual ~Agent() = default;
  // Agents that act on state alone (the expert) skip rendering.
  virtual bool wants_image() const { return true; }
  virtual void reset(const TrackConfig& track, const DroneState& state, const Vec3& vel_world);
  virtual void on_traversal(const TrackConfig& track, int new_target, const DroneState& state,
                            const Vec3& vel_world);
  virtual VelocityCommand act(const AgentContext& ctx) = 0;
};

struct RolloutLimits {
  int max_ticks = 4000;
  double dt = 0.05;
  double tau = 0.2;       // command smoothing time constant
  int total_gates = 24;   // 8 gates x 3 laps
  double overshoot = 3.0; // meters past the gate plane without traversal
  CommandLimits limits;
};

struct ViewParams {
  scene::CameraIntrinsics cam;
  scene::SceneParams scene;
};

// Per-tick demo capture: onboard image, raw expert command, normalized copy.
using DemoSink = std::function<void(const Tensor&, const VelocityCommand&, const std::array<double, 4>&)>;

// Closed-loop episode. Renders the next gate's view each tick (when needed),
// queries the agent, smooths and integrates the command, and advances the
// target on traversal, resampling the traversed gate's offset from rng.
EpisodeRecord rollout(Agent& agent, const TrackConfig& track, const RolloutLimits& limits, const ViewParams& view,
                      Rng& rng, const DemoSink* sink = nullptr, bool record_trace = false);

// Start pose: on the nominal circle half a gate spacing before gate 0, yaw
// along the direction of travel.
DroneState track_start_state(const TrackConfig& track);

// CSV: t,x,y,z,yaw,vx,vy,vz,vpsi,target_gate
void write_trace_csv(const std::filesystem::path& path, const EpisodeRecord& episode);

}  // namespace gatenav::sim
