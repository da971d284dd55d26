#pragma once

#include <string>
#include <vector>

#include "hnav/geometry.hpp"

namespace hnav {

/// Control/physics rate shared by exploration, deployment and logging.
constexpr double kControlDt = 0.04;  // 25 Hz
constexpr double kControlRate = 25.0;

/// Default robot footprint (disc).
constexpr double kFootprintRadius = 0.25;

struct Limits {
  double accel_v = 2.0;        // m/s^2
  double accel_omega = 3.14;   // rad/s^2
  double v_min = -0.2;         // recovery may back up
  double v_max = 1.0;
  double omega_max = 1.57;
};

struct Command {
  double v = 0.0;
  double omega = 0.0;
};

struct RobotState {
  Configuration pose;
  double v = 0.0;
  double omega = 0.0;
  double t = 0.0;
};

struct AxisBounds {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  /// Distance from an interior point to the nearest wall (negative outside).
  double wall_clearance(Vec2 p) const {
    return std::min(std::min(p.x - xmin, xmax - p.x),
                    std::min(p.y - ymin, ymax - p.y));
  }
};

struct World {
  AxisBounds bounds;
  Region obstacles;
  Configuration start;
  Configuration goal;
};

/// Parse/serialize the world file format: JSON with exactly the fields
/// bounds {xmin,ymin,xmax,ymax}, obstacles [{type:"disc",cx,cy,r},...],
/// start {x,y,psi}, goal {x,y,psi}. Unknown fields are rejected.
World world_from_json(const std::string& text);
std::string world_to_json(const World& world);

struct SensorConfig {
  int beam_count = 720;
  double fov = 270.0 * M_PI / 180.0;  // symmetric about the heading
  double max_range = 1.0;
  double min_range = 0.0;

  /// Beam angle relative to the heading. Written so that
  /// rel(beam_count-1-i) == -rel(i) exactly in floating point.
  double beam_rel_angle(int i) const {
    const double step = fov / static_cast<double>(beam_count - 1);
    return (static_cast<double>(i) - static_cast<double>(beam_count - 1) / 2.0) * step;
  }
};

struct Scan {
  std::vector<double> ranges;
  SensorConfig config;
};

/// One physics step. Velocities move toward the (bound-clamped) command,
/// limited by accel * dt; the pose advances along the closed-form constant
/// (v, omega) arc using the post-clamp velocities.
RobotState integrate_unicycle(const RobotState& state, const Command& cmd,
                              double dt, const Limits& limits);

/// Pose reached from `c` after holding (v, omega) for dt (closed-form arc).
Configuration advance_arc(const Configuration& c, double v, double omega,
                          double dt);

/// Ray-cast scan against world obstacles and bounds walls.
Scan lidar_scan(const World& world, const Configuration& pose,
                const SensorConfig& cfg);

/// True iff a disc of radius r at pose overlaps the interior of the
/// obstacles or pokes out of bounds. Exact tangency is not a collision.
bool in_collision(const World& world, const Configuration& pose, double r);

}  // namespace hnav
