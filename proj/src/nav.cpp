#include "hnav/nav.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <json.hpp>

#include "hnav/halluc.hpp"
#include "hnav/io.hpp"

namespace hnav {

namespace {

struct PathProjection {
  size_t segment;   // index of the segment the projection lies on
  double seg_t;     // [0,1] within that segment
  Vec2 point;
  double arc;       // arc length from the path start to the projection
};

PathProjection project_onto_path(const GlobalPath& path, Vec2 p) {
  const auto& wp = path.waypoints;
  PathProjection best{0, 0.0, wp.front(), 0.0};
  double best_d2 = std::numeric_limits<double>::infinity();
  double arc = 0.0;
  if (wp.size() == 1) return best;
  for (size_t i = 0; i + 1 < wp.size(); ++i) {
    const Vec2 a = wp[i];
    const Vec2 b = wp[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    double t = 0.0;
    if (len2 > 1e-18) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const double d2 = (p - q).norm2();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = PathProjection{i, t, q, arc + std::sqrt(len2) * t};
    }
    arc += std::sqrt(len2);
  }
  return best;
}

// Walk `ahead` meters along the path from a projection; returns the point
// and the tangent of the segment it lands on.
std::pair<Vec2, double> walk_path(const GlobalPath& path, const PathProjection& proj,
                                  double ahead) {
  const auto& wp = path.waypoints;
  double remaining = ahead;
  Vec2 cur = proj.point;
  size_t seg = proj.segment;
  double tangent = 0.0;
  if (wp.size() >= 2) {
    const Vec2 d0 = wp[seg + 1] - wp[seg];
    tangent = std::atan2(d0.y, d0.x);
  }
  while (seg + 1 < wp.size()) {
    const Vec2 b = wp[seg + 1];
    const double seg_left = dist(cur, b);
    const Vec2 d = b - cur;
    if (seg_left > 1e-15) tangent = std::atan2(d.y, d.x);
    if (remaining <= seg_left) {
      if (seg_left > 1e-15) return {cur + d * (remaining / seg_left), tangent};
      return {cur, tangent};
    }
    remaining -= seg_left;
    cur = b;
    ++seg;
  }
  return {wp.back(), tangent};
}

double path_tangent_at(const GlobalPath& path, Vec2 p) {
  const auto proj = project_onto_path(path, p);
  return walk_path(path, proj, 0.0).second;
}

// Minimum squared distance from point p to segment ab.
double d2_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  double t = 0.0;
  if (len2 > 1e-18) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  const Vec2 q = a + ab * t;
  return (p - q).norm2();
}

// Grid A* over the dilated world.
struct GridIndex {
  int nx = 0, ny = 0;
  double res = 0.05;
  AxisBounds bounds;
  Vec2 cell_center(int ix, int iy) const {
    return {bounds.xmin + (ix + 0.5) * res, bounds.ymin + (iy + 0.5) * res};
  }
  int clamp_ix(double x) const {
    return std::clamp(static_cast<int>((x - bounds.xmin) / res), 0, nx - 1);
  }
  int clamp_iy(double y) const {
    return std::clamp(static_cast<int>((y - bounds.ymin) / res), 0, ny - 1);
  }
};

bool segment_clear(const World& world, Vec2 a, Vec2 b, double footprint_r,
                   double step) {
  const double len = dist(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Vec2 p = a + (b - a) * t;
    if (in_collision(world, Configuration{p.x, p.y, 0.0}, footprint_r)) return false;
  }
  return true;
}

}  // namespace

double GlobalPath::length() const {
  double len = 0.0;
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) len += dist(waypoints[i], waypoints[i + 1]);
  return len;
}

GlobalPath plan_global(const World& world, double resolution, double footprint_r) {
  GridIndex grid;
  grid.res = resolution;
  grid.bounds = world.bounds;
  grid.nx = std::max(1, static_cast<int>(std::ceil((world.bounds.xmax - world.bounds.xmin) / resolution)));
  grid.ny = std::max(1, static_cast<int>(std::ceil((world.bounds.ymax - world.bounds.ymin) / resolution)));

  std::vector<uint8_t> blocked(static_cast<size_t>(grid.nx) * grid.ny, 0);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec2 c = grid.cell_center(ix, iy);
      blocked[static_cast<size_t>(iy) * grid.nx + ix] =
          in_collision(world, Configuration{c.x, c.y, 0.0}, footprint_r) ? 1 : 0;
    }
  }

  const int sx = grid.clamp_ix(world.start.x);
  const int sy = grid.clamp_iy(world.start.y);
  const int gx = grid.clamp_ix(world.goal.x);
  const int gy = grid.clamp_iy(world.goal.y);
  const auto idx = [&](int ix, int iy) { return static_cast<size_t>(iy) * grid.nx + ix; };
  if (blocked[idx(sx, sy)] || blocked[idx(gx, gy)]) {
    throw NoPath("plan_global: start or goal blocked on the dilated grid");
  }

  const double kSqrt2 = std::sqrt(2.0);
  const auto octile = [&](int ix, int iy) {
    const double dx = std::abs(ix - gx);
    const double dy = std::abs(iy - gy);
    return (std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy)) * resolution;
  };

  struct Node {
    double f;
    double g;
    size_t cell;
    bool operator>(const Node& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g > o.g;
      return cell > o.cell;
    }
  };
  std::vector<double> gscore(blocked.size(), std::numeric_limits<double>::infinity());
  std::vector<int32_t> parent(blocked.size(), -1);
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  gscore[idx(sx, sy)] = 0.0;
  open.push(Node{octile(sx, sy), 0.0, idx(sx, sy)});
  const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const size_t goal_cell = idx(gx, gy);
  bool found = false;
  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    if (node.g > gscore[node.cell]) continue;
    if (node.cell == goal_cell) {
      found = true;
      break;
    }
    const int ix = static_cast<int>(node.cell % grid.nx);
    const int iy = static_cast<int>(node.cell / grid.nx);
    for (int k = 0; k < 8; ++k) {
      const int jx = ix + dxs[k];
      const int jy = iy + dys[k];
      if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
      const size_t j = idx(jx, jy);
      if (blocked[j]) continue;
      // No corner cutting through diagonals.
      if (k >= 4 && (blocked[idx(ix, jy)] || blocked[idx(jx, iy)])) continue;
      const double step = (k < 4 ? 1.0 : kSqrt2) * resolution;
      const double g2 = node.g + step;
      if (g2 < gscore[j]) {
        gscore[j] = g2;
        parent[j] = static_cast<int32_t>(node.cell);
        open.push(Node{g2 + octile(jx, jy), g2, j});
      }
    }
  }
  if (!found) throw NoPath("plan_global: goal unreachable");

  std::vector<Vec2> cells;
  for (int32_t cur = static_cast<int32_t>(goal_cell); cur >= 0; cur = parent[cur]) {
    const int ix = static_cast<int>(cur % grid.nx);
    const int iy = static_cast<int>(cur / grid.nx);
    cells.push_back(grid.cell_center(ix, iy));
    if (static_cast<size_t>(cur) == idx(sx, sy)) break;
  }
  std::reverse(cells.begin(), cells.end());
  cells.front() = world.start.position();
  cells.back() = world.goal.position();

  // Iterated shortcutting: replace subpaths by straight segments whenever
  // the segment stays clear.
  std::vector<Vec2> sparse;
  size_t i = 0;
  sparse.push_back(cells.front());
  while (i + 1 < cells.size()) {
    size_t j = cells.size() - 1;
    for (; j > i + 1; --j) {
      if (segment_clear(world, cells[i], cells[j], footprint_r, resolution * 0.5)) break;
    }
    sparse.push_back(cells[j]);
    i = j;
  }

  // Resample at the grid resolution so consumers see a dense polyline.
  GlobalPath path;
  path.resolution = resolution;
  path.waypoints.push_back(sparse.front());
  for (size_t s = 0; s + 1 < sparse.size(); ++s) {
    const Vec2 a = sparse[s];
    const Vec2 b = sparse[s + 1];
    const double len = dist(a, b);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int k = 1; k <= pieces; ++k) {
      path.waypoints.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    }
  }
  return path;
}

Configuration local_goal(const GlobalPath& path, const Configuration& pose,
                         double lookahead) {
  if (path.waypoints.empty()) throw NoPath("local_goal: empty path");
  const auto proj = project_onto_path(path, pose.position());
  const auto [point, tangent] = walk_path(path, proj, lookahead);
  return Configuration{point.x, point.y, tangent};
}

std::vector<Vec2> scan_obstacle_points(const Scan& scan, const Configuration& pose) {
  std::vector<Vec2> points;
  const Vec2 origin = pose.position();
  for (int i = 0; i < scan.config.beam_count; ++i) {
    const double r = scan.ranges[static_cast<size_t>(i)];
    if (r >= scan.config.max_range) continue;
    const double a = pose.psi + scan.config.beam_rel_angle(i);
    points.push_back(origin + Vec2{std::cos(a), std::sin(a)} * r);
  }
  return points;
}

bool mpc_safe(const Scan& scan, const RobotState& state, const Command& cmd,
              double horizon, double footprint_r, const Limits& limits) {
  const auto points = scan_obstacle_points(scan, state.pose);
  if (points.empty()) return true;
  const double r2 = footprint_r * footprint_r;
  RobotState s = state;
  Vec2 prev = s.pose.position();
  for (const Vec2& p : points) {
    if ((p - prev).norm2() < r2) return false;
  }
  const int steps = std::max(1, static_cast<int>(std::round(horizon / 0.05)));
  for (int k = 0; k < steps; ++k) {
    s = integrate_unicycle(s, cmd, 0.05, limits);
    const Vec2 cur = s.pose.position();
    for (const Vec2& p : points) {
      if (d2_point_segment(p, prev, cur) < r2) return false;
    }
    prev = cur;
  }
  return true;
}

std::pair<Command, RecoveryPhase> recovery_command(RecoveryPhase phase,
                                                   const Configuration& pose,
                                                   const GlobalPath& path,
                                                   bool forward_probe_safe) {
  if (phase == RecoveryPhase::kBackUp) {
    return {Command{-0.2, 0.0}, RecoveryPhase::kBackUp};
  }
  const double tangent = path_tangent_at(path, pose.position());
  const double err = wrap_angle(tangent - pose.psi);
  if (std::abs(err) < 0.1) {
    if (!forward_probe_safe) {
      return {Command{-0.2, 0.0}, RecoveryPhase::kBackUp};
    }
    return {Command{0.0, 0.0}, RecoveryPhase::kAlign};
  }
  const double omega = err >= 0.0 ? 1.57 : -1.57;
  return {Command{0.0, omega}, RecoveryPhase::kAlign};
}

std::vector<DwaCandidate> dwa_evaluate(const Scan& scan, const RobotState& state,
                                       const GlobalPath& path, const DwaParams& params,
                                       const Limits& limits, double footprint_r) {
  const auto points = scan_obstacle_points(scan, state.pose);
  const Configuration goal = local_goal(path, state.pose, 1.0);
  const Vec2 goal_p = goal.position();

  // Acceleration-reachable window around the current velocities, one
  // control period wide, clipped to the command limits (v floor 0: DWA
  // never reverses; recovery owns that).
  const double v_lo = std::clamp(state.v - limits.accel_v * kControlDt, 0.0, limits.v_max);
  const double v_hi = std::clamp(state.v + limits.accel_v * kControlDt, 0.0, limits.v_max);
  const double w_lo = std::clamp(state.omega - limits.accel_omega * kControlDt,
                                 -limits.omega_max, limits.omega_max);
  const double w_hi = std::clamp(state.omega + limits.accel_omega * kControlDt,
                                 -limits.omega_max, limits.omega_max);

  std::vector<DwaCandidate> cands;
  cands.reserve(static_cast<size_t>(params.v_samples) * params.omega_samples);
  const int steps = std::max(1, static_cast<int>(std::round(params.horizon / params.dt)));
  const double r2 = footprint_r * footprint_r;

  std::vector<double> progress, path_neg, clearance;
  for (int i = 0; i < params.v_samples; ++i) {
    const double v = params.v_samples == 1
                         ? v_lo
                         : v_lo + (v_hi - v_lo) * i / (params.v_samples - 1);
    for (int j = 0; j < params.omega_samples; ++j) {
      const double w = params.omega_samples == 1
                           ? w_lo
                           : w_lo + (w_hi - w_lo) * j / (params.omega_samples - 1);
      DwaCandidate cand;
      cand.cmd = Command{v, w};
      Configuration c = state.pose;
      bool feasible = true;
      double min_clear2 = params.clearance_cap * params.clearance_cap;
      for (int k = 0; k < steps; ++k) {
        c = advance_arc(c, v, w, params.dt);
        const Vec2 p = c.position();
        for (const Vec2& obs : points) {
          const double d2 = (obs - p).norm2();
          if (d2 < r2) {
            feasible = false;
            break;
          }
          min_clear2 = std::min(min_clear2, d2);
        }
        if (!feasible) break;
      }
      cand.feasible = feasible;
      if (feasible) {
        const Vec2 end = c.position();
        progress.push_back(dist(state.pose.position(), goal_p) - dist(end, goal_p));
        const auto proj = project_onto_path(path, end);
        path_neg.push_back(-dist(end, proj.point));
        clearance.push_back(std::sqrt(min_clear2));
      }
      cands.push_back(cand);
    }
  }

  // Min-max normalize each term over the feasible set.
  const auto norm = [](const std::vector<double>& xs) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return std::pair<double, double>{lo, hi};
  };
  const auto [g_lo, g_hi] = norm(progress);
  const auto [p_lo, p_hi] = norm(path_neg);
  const auto [c_lo, c_hi] = norm(clearance);
  const auto scale = [](double x, double lo, double hi) {
    return hi - lo > 1e-12 ? (x - lo) / (hi - lo) : 0.0;
  };
  size_t f = 0;
  for (auto& cand : cands) {
    if (!cand.feasible) continue;
    cand.goal_term = scale(progress[f], g_lo, g_hi);
    cand.path_term = scale(path_neg[f], p_lo, p_hi);
    cand.clearance_term = scale(clearance[f], c_lo, c_hi);
    cand.score = cand.goal_term * params.w_goal + cand.path_term * params.w_path +
                 cand.clearance_term * params.w_obstacle;
    ++f;
  }
  return cands;
}

std::optional<Command> dwa_command(const Scan& scan, const RobotState& state,
                                   const GlobalPath& path, const DwaParams& params,
                                   const Limits& limits, double footprint_r) {
  const auto cands = dwa_evaluate(scan, state, path, params, limits, footprint_r);
  const DwaCandidate* best = nullptr;
  for (const auto& cand : cands) {
    if (!cand.feasible) continue;
    if (best == nullptr || cand.score > best->score ||
        (cand.score == best->score && std::abs(cand.cmd.omega) < std::abs(best->cmd.omega))) {
      best = &cand;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->cmd;
}

Scan lfh_runtime_scan(const GlobalPath& path, const Configuration& pose,
                      const SensorConfig& cfg, double footprint_r, double lookahead) {
  if (path.waypoints.empty()) throw NoPath("lfh_runtime_scan: empty path");
  const auto proj = project_onto_path(path, pose.position());
  // Pseudo-trajectory: the robot position joined to the path segment ahead.
  std::vector<Configuration> traj;
  traj.push_back(pose);
  const auto& wp = path.waypoints;
  double remaining = lookahead;
  Vec2 cur = proj.point;
  traj.push_back(Configuration{cur.x, cur.y, pose.psi});
  size_t seg = proj.segment;
  while (seg + 1 < wp.size() && remaining > 0.0) {
    const Vec2 b = wp[seg + 1];
    const double seg_left = dist(cur, b);
    if (seg_left < 1e-15) {
      ++seg;
      continue;
    }
    if (remaining <= seg_left) {
      const Vec2 end = cur + (b - cur) * (remaining / seg_left);
      traj.push_back(Configuration{end.x, end.y, pose.psi});
      remaining = 0.0;
      break;
    }
    traj.push_back(Configuration{b.x, b.y, pose.psi});
    remaining -= seg_left;
    cur = b;
    ++seg;
  }
  const Region corridor = swept_corridor(traj, footprint_r);
  Scan scan;
  scan.config = cfg;
  scan.ranges.resize(cfg.beam_count);
  const Vec2 origin = pose.position();
  for (int i = 0; i < cfg.beam_count; ++i) {
    const Ray ray{origin, pose.psi + cfg.beam_rel_angle(i)};
    const auto hits = ray_region_distances(ray, corridor, cfg.max_range);
    scan.ranges[static_cast<size_t>(i)] =
        hits.last_exit ? std::min(*hits.last_exit, cfg.max_range) : 0.0;
  }
  return scan;
}

EpisodeResult navigate_episode(const World& world, const NavConfig& config,
                               double timeout, std::vector<TraceStep>* trace) {
  if ((config.kind == PlannerKind::kHlsd || config.kind == PlannerKind::kLfh) &&
      config.net == nullptr) {
    throw ConfigError("navigate_episode: learned planner needs weights");
  }
  const GlobalPath path = plan_global(world, 0.05, config.footprint_r);

  EpisodeResult result;
  RobotState state;
  state.pose = world.start;
  bool recovering = false;
  RecoveryPhase phase = RecoveryPhase::kAlign;
  bool was_colliding = false;
  const Vec2 goal_p = world.goal.position();

  const auto planner_cmd = [&](const Scan& scan) -> std::optional<Command> {
    const Configuration lg = local_goal(path, state.pose, config.lookahead);
    const Vec2 d = lg.position() - state.pose.position();
    const double c = std::cos(state.pose.psi);
    const double s = std::sin(state.pose.psi);
    const Vec2 goal_rel{c * d.x + s * d.y, -s * d.x + c * d.y};
    switch (config.kind) {
      case PlannerKind::kHlsd: {
        Command cmd = predict_action(*config.net, scan, goal_rel,
                                     Command{state.v, state.omega});
        if (config.speed_cap) cmd.v = std::min(cmd.v, *config.speed_cap);
        return cmd;
      }
      case PlannerKind::kLfh: {
        const Scan h = lfh_runtime_scan(path, state.pose, config.sensor,
                                        config.footprint_r, config.lookahead);
        Command cmd = predict_action(*config.net, h, goal_rel,
                                     Command{state.v, state.omega});
        if (config.speed_cap) cmd.v = std::min(cmd.v, *config.speed_cap);
        return cmd;
      }
      case PlannerKind::kDwa:
        return dwa_command(scan, state, path, config.dwa, config.limits,
                           config.footprint_r);
    }
    return std::nullopt;
  };

  while (state.t < timeout) {
    const Scan scan = lidar_scan(world, state.pose, config.sensor);
    const auto raw = planner_cmd(scan);
    const bool raw_safe =
        raw.has_value() && mpc_safe(scan, state, *raw, config.mpc_horizon,
                                    config.footprint_r, config.limits);
    Command cmd;
    if (!recovering) {
      if (raw_safe) {
        cmd = *raw;
      } else {
        recovering = true;
        phase = RecoveryPhase::kAlign;
        ++result.recovery_invocations;
      }
    }
    if (recovering) {
      if (raw_safe) {
        recovering = false;  // a forward command passes again
        cmd = *raw;
      } else {
        auto [rc, next_phase] = recovery_command(phase, state.pose, path, false);
        phase = next_phase;
        cmd = rc;
      }
    }

    const Vec2 before = state.pose.position();
    state = integrate_unicycle(state, cmd, kControlDt, config.limits);
    result.path_length += dist(before, state.pose.position());

    if (trace != nullptr) {
      trace->push_back(TraceStep{state.t, state.pose, cmd, raw_safe,
                                 !recovering ? "plan"
                                 : phase == RecoveryPhase::kAlign ? "align"
                                                                  : "backup"});
    }

    const bool colliding = in_collision(world, state.pose, config.footprint_r);
    if (colliding && !was_colliding) {
      ++result.collisions;
      if (result.collisions > config.max_collisions) return result;  // time stays inf
      recovering = true;
      phase = RecoveryPhase::kBackUp;  // forced back-up after a hit
      ++result.recovery_invocations;
    }
    was_colliding = colliding;

    if (dist(state.pose.position(), goal_p) <= config.goal_tolerance) {
      result.success = true;
      result.time = state.t;
      return result;
    }
  }
  return result;
}

std::string trace_to_jsonl(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& step : trace) {
    out += "{\"t\":" + format_double(step.t, 3);
    out += ",\"x\":" + format_double(step.pose.x, 6);
    out += ",\"y\":" + format_double(step.pose.y, 6);
    out += ",\"psi\":" + format_double(step.pose.psi, 6);
    out += ",\"v\":" + format_double(step.cmd.v, 6);
    out += ",\"omega\":" + format_double(step.cmd.omega, 6);
    out += ",\"safe\":";
    out += step.safe ? "true" : "false";
    out += ",\"phase\":\"" + step.phase + "\"}\n";
  }
  return out;
}

}  // namespace hnav
