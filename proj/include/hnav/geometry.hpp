#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "hnav/errors.hpp"

namespace hnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  Vec2 perp() const { return {-y, x}; }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

/// Planar pose. psi is the heading, kept in (-pi, pi].
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Vec2 position() const { return {x, y}; }
};

// --- Region primitives -----------------------------------------------------

struct Disc {
  Vec2 center;
  double radius;
};

/// Segment ab dilated by radius (a capsule).
struct Stadium {
  Vec2 a;
  Vec2 b;
  double radius;
};

/// Circle cut by the chord (chord_a, chord_b); keeps the half on `side`,
/// where side * cross(chord_b - chord_a, p - chord_a) >= 0 for points p kept.
struct CircularSegment {
  Vec2 center;
  double radius;
  Vec2 chord_a;
  Vec2 chord_b;
  int side;
};

using Primitive = std::variant<Disc, Stadium, CircularSegment>;

/// Closed planar region: a union of analytic primitives. Empty list = empty
/// region. All radii must be positive; segment chord endpoints must lie on
/// their circle within 1e-9.
class Region {
 public:
  Region() = default;

  void add(const Primitive& p);
  bool empty() const { return prims_.empty(); }
  const std::vector<Primitive>& primitives() const { return prims_; }

  /// Closed-set membership.
  bool contains(Vec2 p) const;

  /// Distance from p to the region (0 if inside).
  double distance(Vec2 p) const;

  /// Penetration depth: distance from p to the region boundary if p is
  /// inside, negative (minus the outside distance) otherwise.
  double depth(Vec2 p) const;

 private:
  std::vector<Primitive> prims_;
};

struct Ray {
  Vec2 origin;
  double angle;

  Vec2 dir() const { return {std::cos(angle), std::sin(angle)}; }
};

struct Circle {
  Vec2 center;
  double radius;
};

struct RayHits {
  std::optional<double> first_hit;
  std::optional<double> last_exit;
};

/// [t0, t1] stretch of a ray inside a region, in ray parameter units.
struct Span {
  double t0;
  double t1;
};

// --- Operations -------------------------------------------------------------

/// Mirror image of c_m's position across the infinite line through c_c and
/// c_g. Headings are ignored. Throws DegenerateChord when c_c ~ c_g.
Vec2 reflect_across_chord(const Configuration& c_c, const Configuration& c_g,
                          const Configuration& c_m);

/// Circumscribed circle of a triangle, or nullopt when the triangle area is
/// below 1e-9 m^2 (collinear / straight-path degenerate case).
std::optional<Circle> circle_through_three_points(Vec2 a, Vec2 b, Vec2 c);

/// Union of stadiums over consecutive configuration pairs plus end discs:
/// the area swept by a disc of radius r moving along the trajectory.
/// Throws EmptyTrajectory when the trajectory is empty.
Region swept_corridor(const std::vector<Configuration>& trajectory, double r);

/// Sorted, merged spans of the ray inside the region, clipped to
/// [0, max_range]. Degenerate (tangent) touches are dropped.
std::vector<Span> ray_region_spans(const Ray& ray, const Region& region,
                                   double max_range);

/// first_hit: smallest t in [0, max_range] where the ray is inside the
/// region (0 when the origin starts inside); none if it never is.
/// last_exit: largest such t, clamped to max_range when the ray is still
/// inside at max_range; none if the ray never enters.
RayHits ray_region_distances(const Ray& ray, const Region& region,
                             double max_range);

}  // namespace hnav
