#include "hnav/sim.hpp"

#include <cmath>

#include <json.hpp>

namespace hnav {

namespace {

double move_toward(double current, double target, double max_step) {
  const double delta = target - current;
  if (delta > max_step) return current + max_step;
  if (delta < -max_step) return current - max_step;
  return target;
}

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                  const char* where) {
  for (const char* k : keys) {
    if (!obj.contains(k)) {
      throw ConfigError(std::string("world file: missing '") + k + "' in " + where);
    }
  }
  if (obj.size() != keys.size()) {
    throw ConfigError(std::string("world file: unknown field in ") + where);
  }
}

double require_finite(double v, const char* where) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string("world file: non-finite value in ") + where);
  }
  return v;
}

Configuration config_from(const nlohmann::json& obj, const char* where) {
  require_keys(obj, {"x", "y", "psi"}, where);
  Configuration c;
  c.x = require_finite(obj.at("x").get<double>(), where);
  c.y = require_finite(obj.at("y").get<double>(), where);
  c.psi = wrap_angle(require_finite(obj.at("psi").get<double>(), where));
  return c;
}

}  // namespace

RobotState integrate_unicycle(const RobotState& state, const Command& cmd,
                              double dt, const Limits& limits) {
  RobotState next = state;
  const double v_target = clamp(cmd.v, limits.v_min, limits.v_max);
  const double w_target = clamp(cmd.omega, -limits.omega_max, limits.omega_max);
  next.v = move_toward(state.v, v_target, limits.accel_v * dt);
  next.omega = move_toward(state.omega, w_target, limits.accel_omega * dt);
  next.pose = advance_arc(state.pose, next.v, next.omega, dt);
  next.t = state.t + dt;
  return next;
}

Configuration advance_arc(const Configuration& c, double v, double omega,
                          double dt) {
  Configuration out = c;
  if (std::abs(omega) < 1e-9) {
    out.x = c.x + v * dt * std::cos(c.psi);
    out.y = c.y + v * dt * std::sin(c.psi);
    out.psi = wrap_angle(c.psi + omega * dt);
    return out;
  }
  const double radius = v / omega;
  const double psi1 = c.psi + omega * dt;
  out.x = c.x + radius * (std::sin(psi1) - std::sin(c.psi));
  out.y = c.y - radius * (std::cos(psi1) - std::cos(c.psi));
  out.psi = wrap_angle(psi1);
  return out;
}

Scan lidar_scan(const World& world, const Configuration& pose,
                const SensorConfig& cfg) {
  Scan scan;
  scan.config = cfg;
  scan.ranges.resize(cfg.beam_count);
  const Vec2 origin = pose.position();
  for (int i = 0; i < cfg.beam_count; ++i) {
    const Ray ray{origin, pose.psi + cfg.beam_rel_angle(i)};
    double range = cfg.max_range;
    const auto hits = ray_region_distances(ray, world.obstacles, cfg.max_range);
    if (hits.first_hit) range = std::min(range, *hits.first_hit);
    // Bounds walls: exit parameter of the ray from the interior rectangle.
    const Vec2 d = ray.dir();
    double t_wall = cfg.max_range;
    if (d.x > 1e-15) t_wall = std::min(t_wall, (world.bounds.xmax - origin.x) / d.x);
    if (d.x < -1e-15) t_wall = std::min(t_wall, (world.bounds.xmin - origin.x) / d.x);
    if (d.y > 1e-15) t_wall = std::min(t_wall, (world.bounds.ymax - origin.y) / d.y);
    if (d.y < -1e-15) t_wall = std::min(t_wall, (world.bounds.ymin - origin.y) / d.y);
    if (t_wall >= 0.0) range = std::min(range, t_wall);
    scan.ranges[i] = std::max(range, cfg.min_range);
  }
  return scan;
}

bool in_collision(const World& world, const Configuration& pose, double r) {
  // Tangency (distance exactly r) is not a collision; the 1e-9 band keeps
  // that rule stable when decimal inputs round across the boundary.
  constexpr double kBoundaryEps = 1e-9;
  const Vec2 p = pose.position();
  if (world.bounds.wall_clearance(p) < r - kBoundaryEps) return true;
  return world.obstacles.distance(p) < r - kBoundaryEps;
}

World world_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  require_keys(j, {"bounds", "obstacles", "start", "goal"}, "root");
  World w;
  const auto& b = j.at("bounds");
  require_keys(b, {"xmin", "ymin", "xmax", "ymax"}, "bounds");
  w.bounds.xmin = require_finite(b.at("xmin").get<double>(), "bounds");
  w.bounds.ymin = require_finite(b.at("ymin").get<double>(), "bounds");
  w.bounds.xmax = require_finite(b.at("xmax").get<double>(), "bounds");
  w.bounds.ymax = require_finite(b.at("ymax").get<double>(), "bounds");
  if (w.bounds.xmin >= w.bounds.xmax || w.bounds.ymin >= w.bounds.ymax) {
    throw ConfigError("world file: empty bounds rectangle");
  }
  for (const auto& obs : j.at("obstacles")) {
    require_keys(obs, {"type", "cx", "cy", "r"}, "obstacle");
    if (obs.at("type").get<std::string>() != "disc") {
      throw ConfigError("world file: unsupported obstacle type");
    }
    Disc d;
    d.center.x = require_finite(obs.at("cx").get<double>(), "obstacle");
    d.center.y = require_finite(obs.at("cy").get<double>(), "obstacle");
    d.radius = require_finite(obs.at("r").get<double>(), "obstacle");
    if (!(d.radius > 0.0)) throw ConfigError("world file: obstacle radius must be > 0");
    if (d.center.x - d.radius < w.bounds.xmin || d.center.x + d.radius > w.bounds.xmax ||
        d.center.y - d.radius < w.bounds.ymin || d.center.y + d.radius > w.bounds.ymax) {
      throw ConfigError("world file: obstacle outside bounds");
    }
    w.obstacles.add(d);
  }
  w.start = config_from(j.at("start"), "start");
  w.goal = config_from(j.at("goal"), "goal");
  return w;
}

std::string world_to_json(const World& world) {
  nlohmann::json j;
  j["bounds"] = {{"xmin", world.bounds.xmin},
                 {"ymin", world.bounds.ymin},
                 {"xmax", world.bounds.xmax},
                 {"ymax", world.bounds.ymax}};
  j["obstacles"] = nlohmann::json::array();
  for (const auto& prim : world.obstacles.primitives()) {
    const auto* d = std::get_if<Disc>(&prim);
    if (d == nullptr) throw ConfigError("world file: only disc obstacles serialize");
    j["obstacles"].push_back(
        {{"type", "disc"}, {"cx", d->center.x}, {"cy", d->center.y}, {"r", d->radius}});
  }
  j["start"] = {{"x", world.start.x}, {"y", world.start.y}, {"psi", world.start.psi}};
  j["goal"] = {{"x", world.goal.x}, {"y", world.goal.y}, {"psi", world.goal.psi}};
  return j.dump(2) + "\n";
}

}  // namespace hnav
