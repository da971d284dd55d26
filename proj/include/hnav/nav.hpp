#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hnav/geometry.hpp"
#include "hnav/model.hpp"
#include "hnav/sim.hpp"

namespace hnav {

struct GlobalPath {
  std::vector<Vec2> waypoints;
  double resolution = 0.05;

  double length() const;
};

enum class PlannerKind { kHlsd, kLfh, kDwa };

struct DwaParams {
  int v_samples = 12;
  int omega_samples = 40;
  double horizon = 1.0;
  double dt = 0.05;
  double w_goal = 2.0;
  double w_path = 1.0;
  double w_obstacle = 1.0;
  double clearance_cap = 1.0;  // clearance beyond this scores the same
};

struct NavConfig {
  PlannerKind kind = PlannerKind::kDwa;
  const Mlp* net = nullptr;  // required for kHlsd / kLfh
  double mpc_horizon = 1.0;
  std::optional<double> speed_cap;  // 0.6 for planners trained on the 0.4 set
  DwaParams dwa;
  double goal_tolerance = 0.3;
  double footprint_r = kFootprintRadius;
  double lookahead = 1.0;
  SensorConfig sensor;
  Limits limits;
  int max_collisions = 5;
};

struct EpisodeResult {
  bool success = false;
  double time = std::numeric_limits<double>::infinity();
  int collisions = 0;
  int recovery_invocations = 0;
  double path_length = 0.0;
};

/// Rasterize the world (obstacles dilated by footprint_r, bounds as walls),
/// run 8-connected A* with the octile heuristic, shortcut-smooth, then
/// resample at the grid resolution. Throws NoPath when unreachable.
GlobalPath plan_global(const World& world, double resolution = 0.05,
                       double footprint_r = kFootprintRadius);

/// Point `lookahead` meters past the projection of pose onto the path
/// (arc length along the path); the final waypoint when less remains.
/// The returned heading is the local path tangent.
Configuration local_goal(const GlobalPath& path, const Configuration& pose,
                         double lookahead = 1.0);

/// Beam endpoints with range < max_range, in world coordinates.
std::vector<Vec2> scan_obstacle_points(const Scan& scan, const Configuration& pose);

/// Roll the plant forward under a held command (accel limits honored) at
/// dt = 0.05 s and test the swept polyline against the scan-derived
/// obstacle points. Safe means no point comes within footprint_r.
bool mpc_safe(const Scan& scan, const RobotState& state, const Command& cmd,
              double horizon = 1.0, double footprint_r = kFootprintRadius,
              const Limits& limits = Limits{});

enum class RecoveryPhase { kAlign, kBackUp };

/// Two-phase recovery: rotate in place toward the path tangent, then back
/// up at -0.2 m/s if an aligned forward command still fails the safety
/// check (the caller passes that probe result in).
std::pair<Command, RecoveryPhase> recovery_command(RecoveryPhase phase,
                                                   const Configuration& pose,
                                                   const GlobalPath& path,
                                                   bool forward_probe_safe);

struct DwaCandidate {
  Command cmd;
  bool feasible = false;
  double goal_term = 0.0;       // normalized [0,1]
  double path_term = 0.0;
  double clearance_term = 0.0;
  double score = 0.0;
};

/// Score the full candidate grid (v_samples x omega_samples over the
/// acceleration window). Infeasible candidates keep score 0 and are never
/// selected.
std::vector<DwaCandidate> dwa_evaluate(const Scan& scan, const RobotState& state,
                                       const GlobalPath& path, const DwaParams& params,
                                       const Limits& limits = Limits{},
                                       double footprint_r = kFootprintRadius);

/// Argmax of dwa_evaluate; ties broken by smaller |omega|, then smaller
/// grid index. nullopt when every candidate collides (recovery sentinel).
std::optional<Command> dwa_command(const Scan& scan, const RobotState& state,
                                   const GlobalPath& path, const DwaParams& params,
                                   const Limits& limits = Limits{},
                                   double footprint_r = kFootprintRadius);

/// Runtime hallucination for the LfH planner: the most-constrained scan of
/// the corridor along the global path ahead of the robot.
Scan lfh_runtime_scan(const GlobalPath& path, const Configuration& pose,
                      const SensorConfig& cfg, double footprint_r = kFootprintRadius,
                      double lookahead = 1.0);

struct TraceStep {
  double t;
  Configuration pose;
  Command cmd;
  bool safe;
  std::string phase;
};

/// Closed-loop deployment at 25 Hz with MPC gating, recovery, collision
/// counting and the paper's infinity-on-failure convention.
EpisodeResult navigate_episode(const World& world, const NavConfig& config,
                               double timeout,
                               std::vector<TraceStep>* trace = nullptr);

std::string trace_to_jsonl(const std::vector<TraceStep>& trace);

}  // namespace hnav
