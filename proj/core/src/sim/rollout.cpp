#include "gatenav/sim/rollout.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gatenav/common/error.hpp"
#include "gatenav/scene/pose.hpp"

namespace gatenav::sim {

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::kCompleted:
      return "completed";
    case Termination::kCollision:
      return "collision";
    case Termination::kTimeout:
      return "timeout";
    case Termination::kMissedGate:
      return "missed_gate";
  }
  return "unknown";
}

void Agent::reset(const TrackConfig&, const DroneState&, const Vec3&) {}
void Agent::on_traversal(const TrackConfig&, int, const DroneState&, const Vec3&) {}

namespace {

struct GateFrame {
  Vec3 center;
  Vec3 normal;   // travel direction through the gate
  Vec3 lateral;  // in-plane horizontal
};

GateFrame gate_frame(const GatePlacement& gate) {
  const double c = std::cos(gate.facing_yaw), s = std::sin(gate.facing_yaw);
  return {gate.center(), {c, s, 0.0}, {-s, c, 0.0}};
}

}  // namespace

TraversalOutcome check_traversal(const Vec3& prev, const Vec3& curr, const GatePlacement& gate, double gate_side,
                                 double bar_thickness) {
  const GateFrame f = gate_frame(gate);
  const double prev_x = f.normal.dot(prev - f.center);
  const double curr_x = f.normal.dot(curr - f.center);
  if (!(prev_x < 0.0 && curr_x >= 0.0)) return TraversalOutcome::kNone;  // no front-to-back crossing

  const double t = prev_x / (prev_x - curr_x);
  const Vec3 hit = prev + t * (curr - prev);
  const double ly = std::abs(f.lateral.dot(hit - f.center));
  const double lz = std::abs(hit.z - f.center.z);
  const double outer = gate_side / 2.0;
  const double inner = outer - bar_thickness;
  if (ly <= inner && lz <= inner) return TraversalOutcome::kTraversed;
  if (ly <= outer && lz <= outer) return TraversalOutcome::kCollided;
  return TraversalOutcome::kNone;
}

DroneState track_start_state(const TrackConfig& track) {
  const double spacing = 2.0 * M_PI / static_cast<double>(track.gates.size());
  const double angle = -spacing / 2.0;
  DroneState s;
  s.position = {track.radius() * std::cos(angle), track.radius() * std::sin(angle), track.altitude};
  s.yaw = wrap_angle(angle + M_PI / 2.0);
  return s;
}

EpisodeRecord rollout(Agent& agent, const TrackConfig& track_init, const RolloutLimits& limits,
                      const ViewParams& view, Rng& rng, const DemoSink* sink, bool record_trace) {
  if (track_init.gates.empty()) throw ConfigError("rollout: track has no gates");
  TrackConfig track = track_init;
  const int gate_count = static_cast<int>(track.gates.size());

  const scene::ResolvedColors colors = scene::sample_colors(view.scene, rng);
  const bool need_image = agent.wants_image() || sink != nullptr;

  EpisodeRecord ep;
  DroneState state = track_start_state(track);
  CommandFilter filter(limits.tau);
  int target = 0;
  agent.reset(track, state, Vec3{});

  bool terminated = false;
  for (int tick = 0; tick < limits.max_ticks && !terminated; ++tick) {
    const GatePlacement& gate = track.gates[static_cast<size_t>(target)];
    const Vec3 vel_world = yaw_rotate(state.yaw, Vec3{filter.current().vx, filter.current().vy, filter.current().vz});

    Tensor image;
    if (need_image) {
      const Vec3 d_body = yaw_unrotate(state.yaw, gate.center() - state.position);
      scene::RelativeGatePose pose;
      if (d_body.norm() > 1e-9)
        pose = scene::cartesian_to_spherical(d_body, gate.facing_yaw, state.yaw);
      else
        pose.psi = wrap_angle(gate.facing_yaw - state.yaw);
      image = scene::render(view.cam, view.scene, colors, pose, 0.0, 0.0);
    }

    AgentContext ctx{state, vel_world, track, target, need_image ? &image : nullptr};
    const VelocityCommand cmd = agent.act(ctx);
    if (sink) (*sink)(image, cmd, normalize_command(cmd, limits.limits));
    if (record_trace) ep.ticks.push_back({state.time, state.position, state.yaw, cmd, target});

    const VelocityCommand applied = filter.apply(clamp_command(cmd, limits.limits), limits.dt);
    const Vec3 prev = state.position;
    state = step(state, applied, limits.dt);
    ep.ticks_run = tick + 1;

    switch (check_traversal(prev, state.position, gate, view.scene.gate_side, view.scene.bar_thickness)) {
      case TraversalOutcome::kCollided:
        ep.termination = Termination::kCollision;
        terminated = true;
        break;
      case TraversalOutcome::kTraversed: {
        ep.gates_traversed += 1;
        track.gates[static_cast<size_t>(target)].traversal_count += 1;
        resample_gate_offset(track, target, rng);
        if (ep.gates_traversed >= limits.total_gates) {
          ep.termination = Termination::kCompleted;
          terminated = true;
          break;
        }
        target = (target + 1) % gate_count;
        const Vec3 new_vel =
            yaw_rotate(state.yaw, Vec3{filter.current().vx, filter.current().vy, filter.current().vz});
        agent.on_traversal(track, target, state, new_vel);
        break;
      }
      case TraversalOutcome::kNone: {
        const GateFrame f = gate_frame(track.gates[static_cast<size_t>(target)]);
        if (f.normal.dot(state.position - f.center) > limits.overshoot) {
          ep.termination = Termination::kMissedGate;
          terminated = true;
        }
        break;
      }
    }
  }

  ep.score = static_cast<double>(std::min(ep.gates_traversed, limits.total_gates)) /
             static_cast<double>(limits.total_gates);
  return ep;
}

void write_trace_csv(const std::filesystem::path& path, const EpisodeRecord& episode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "t,x,y,z,yaw,vx,vy,vz,vpsi,target_gate\n";
  char line[256];
  for (const auto& tk : episode.ticks) {
    std::snprintf(line, sizeof(line), "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", tk.t, tk.position.x,
                  tk.position.y, tk.position.z, tk.yaw, tk.cmd.vx, tk.cmd.vy, tk.cmd.vz, tk.cmd.vpsi, tk.target_gate);
    os << line;
  }
}

}  // namespace gatenav::sim
