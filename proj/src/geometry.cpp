#include "hnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hnav {

namespace {

constexpr double kTinyLen = 1e-12;
constexpr double kCollinearArea = 1e-9;
constexpr double kChordOnCircleTol = 1e-9;

double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

// Closest point parameter of p on segment ab, in [0, 1].
double segment_param(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 < kTinyLen * kTinyLen) return 0.0;
  return clamp01((p - a).dot(ab) / len2);
}

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const double t = segment_param(p, a, b);
  return dist(p, a + (b - a) * t);
}

bool segment_side_ok(const CircularSegment& s, Vec2 p) {
  const double c = (s.chord_b - s.chord_a).cross(p - s.chord_a);
  return static_cast<double>(s.side) * c >= 0.0;
}

// Depth of p in a single primitive: positive inside, negative outside,
// magnitude = distance to the primitive boundary.
double prim_depth(const Disc& d, Vec2 p) { return d.radius - dist(p, d.center); }

double prim_depth(const Stadium& s, Vec2 p) {
  return s.radius - dist_point_segment(p, s.a, s.b);
}

double prim_depth(const CircularSegment& s, Vec2 p) {
  const Vec2 u = p - s.center;
  const double d_center = u.norm();
  const Vec2 chord = s.chord_b - s.chord_a;
  const double chord_len = chord.norm();
  const double signed_halfplane =
      chord_len > kTinyLen
          ? static_cast<double>(s.side) * chord.cross(p - s.chord_a) / chord_len
          : -d_center;
  const bool inside = d_center <= s.radius && signed_halfplane >= 0.0;

  // Distance to the arc portion of the boundary.
  double d_arc;
  if (d_center < kTinyLen) {
    d_arc = s.radius;
  } else {
    const Vec2 on_circle = s.center + u * (s.radius / d_center);
    if (segment_side_ok(s, on_circle)) {
      d_arc = std::abs(d_center - s.radius);
    } else {
      d_arc = std::min(dist(p, s.chord_a), dist(p, s.chord_b));
    }
  }
  const double d_chord = dist_point_segment(p, s.chord_a, s.chord_b);
  const double d_boundary = std::min(d_arc, d_chord);
  return inside ? d_boundary : -d_boundary;
}

double prim_depth(const Primitive& prim, Vec2 p) {
  return std::visit([&](const auto& s) { return prim_depth(s, p); }, prim);
}

// Ray-span of a single convex primitive, or nullopt when the ray misses it.
// Spans are in ray parameter units, unclipped.
std::optional<Span> ray_span(const Disc& disc, Vec2 o, Vec2 d) {
  const Vec2 oc = o - disc.center;
  const double b = oc.dot(d);
  const double c = oc.norm2() - disc.radius * disc.radius;
  const double disc_q = b * b - c;
  if (disc_q <= 0.0) return std::nullopt;
  const double s = std::sqrt(disc_q);
  return Span{-b - s, -b + s};
}

std::optional<Span> intersect(std::optional<Span> a, std::optional<Span> b) {
  if (!a || !b) return std::nullopt;
  const double t0 = std::max(a->t0, b->t0);
  const double t1 = std::min(a->t1, b->t1);
  if (t0 >= t1) return std::nullopt;
  return Span{t0, t1};
}

// Span of t where lo <= c0 + c1*t <= hi.
std::optional<Span> linear_band_span(double c0, double c1, double lo, double hi) {
  if (std::abs(c1) < kTinyLen) {
    if (c0 < lo || c0 > hi) return std::nullopt;
    return Span{-1e30, 1e30};
  }
  double t0 = (lo - c0) / c1;
  double t1 = (hi - c0) / c1;
  if (t0 > t1) std::swap(t0, t1);
  return Span{t0, t1};
}

std::optional<Span> ray_span(const Stadium& st, Vec2 o, Vec2 d) {
  const Vec2 ab = st.b - st.a;
  const double len = ab.norm();
  if (len < kTinyLen) return ray_span(Disc{st.a, st.radius}, o, d);
  const Vec2 e = ab * (1.0 / len);
  const Vec2 n = e.perp();
  // Oriented rectangle part: 0 <= (p-a).e <= len, |(p-a).n| <= radius.
  const Vec2 oa = o - st.a;
  const auto along = linear_band_span(oa.dot(e), d.dot(e), 0.0, len);
  const auto across = linear_band_span(oa.dot(n), d.dot(n), -st.radius, st.radius);
  const auto rect = intersect(along, across);
  const auto cap_a = ray_span(Disc{st.a, st.radius}, o, d);
  const auto cap_b = ray_span(Disc{st.b, st.radius}, o, d);
  // A capsule is convex, so the union of the three pieces is one interval.
  bool any = false;
  double t0 = 0.0, t1 = 0.0;
  for (const auto& piece : {rect, cap_a, cap_b}) {
    if (!piece) continue;
    if (!any) {
      t0 = piece->t0;
      t1 = piece->t1;
      any = true;
    } else {
      t0 = std::min(t0, piece->t0);
      t1 = std::max(t1, piece->t1);
    }
  }
  if (!any) return std::nullopt;
  return Span{t0, t1};
}

std::optional<Span> ray_span(const CircularSegment& seg, Vec2 o, Vec2 d) {
  const auto in_circle = ray_span(Disc{seg.center, seg.radius}, o, d);
  if (!in_circle) return std::nullopt;
  // Half-plane side * cross(chord, p - chord_a) >= 0, linear in t.
  const Vec2 chord = seg.chord_b - seg.chord_a;
  const double c0 = static_cast<double>(seg.side) * chord.cross(o - seg.chord_a);
  const double c1 = static_cast<double>(seg.side) * chord.cross(d);
  std::optional<Span> half;
  if (std::abs(c1) < kTinyLen) {
    if (c0 < 0.0) return std::nullopt;
    half = Span{-1e30, 1e30};
  } else if (c1 > 0.0) {
    half = Span{-c0 / c1, 1e30};
  } else {
    half = Span{-1e30, -c0 / c1};
  }
  return intersect(in_circle, half);
}

std::optional<Span> ray_span(const Primitive& prim, Vec2 o, Vec2 d) {
  return std::visit([&](const auto& s) { return ray_span(s, o, d); }, prim);
}

void validate(const Primitive& prim) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if (!(s.radius > 0.0)) throw BoundsViolation("primitive radius must be > 0");
        if constexpr (std::is_same_v<T, CircularSegment>) {
          if (std::abs(dist(s.chord_a, s.center) - s.radius) > kChordOnCircleTol ||
              std::abs(dist(s.chord_b, s.center) - s.radius) > kChordOnCircleTol) {
            throw BoundsViolation("segment chord endpoints must lie on the circle");
          }
          if (s.side != 1 && s.side != -1) {
            throw BoundsViolation("segment side flag must be +1 or -1");
          }
        }
      },
      prim);
}

}  // namespace

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

void Region::add(const Primitive& p) {
  validate(p);
  prims_.push_back(p);
}

bool Region::contains(Vec2 p) const {
  for (const auto& prim : prims_) {
    if (prim_depth(prim, p) >= 0.0) return true;
  }
  return false;
}

double Region::distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& prim : prims_) {
    const double depth = prim_depth(prim, p);
    if (depth >= 0.0) return 0.0;
    best = std::min(best, -depth);
  }
  return best;
}

double Region::depth(Vec2 p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& prim : prims_) {
    best = std::max(best, prim_depth(prim, p));
  }
  return best;
}

Vec2 reflect_across_chord(const Configuration& c_c, const Configuration& c_g,
                          const Configuration& c_m) {
  const Vec2 a = c_c.position();
  const Vec2 b = c_g.position();
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 <= kChordOnCircleTol * kChordOnCircleTol) {
    throw DegenerateChord("reflect_across_chord: c_c and c_g coincide");
  }
  const Vec2 p = c_m.position();
  const double t = (p - a).dot(ab) / len2;
  const Vec2 foot = a + ab * t;
  return foot + (foot - p);
}

std::optional<Circle> circle_through_three_points(Vec2 a, Vec2 b, Vec2 c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  // |d| = 4 * triangle area.
  if (std::abs(d) < 4.0 * kCollinearArea) return std::nullopt;
  const double sa = a.norm2();
  const double sb = b.norm2();
  const double sc = c.norm2();
  const double ux = (sa * (b.y - c.y) + sb * (c.y - a.y) + sc * (a.y - b.y)) / d;
  const double uy = (sa * (c.x - b.x) + sb * (a.x - c.x) + sc * (b.x - a.x)) / d;
  const Vec2 center{ux, uy};
  return Circle{center, dist(center, a)};
}

Region swept_corridor(const std::vector<Configuration>& trajectory, double r) {
  if (trajectory.empty()) throw EmptyTrajectory("swept_corridor: empty trajectory");
  if (!(r > 0.0)) throw BoundsViolation("swept_corridor: r must be > 0");
  Region region;
  if (trajectory.size() == 1) {
    region.add(Disc{trajectory.front().position(), r});
    return region;
  }
  bool emitted = false;
  for (size_t i = 0; i + 1 < trajectory.size(); ++i) {
    const Vec2 a = trajectory[i].position();
    const Vec2 b = trajectory[i + 1].position();
    if (dist(a, b) < kTinyLen) continue;
    region.add(Stadium{a, b, r});
    emitted = true;
  }
  if (!emitted) {
    // Pure rotation: every configuration shares one position.
    region.add(Disc{trajectory.front().position(), r});
    return region;
  }
  region.add(Disc{trajectory.front().position(), r});
  region.add(Disc{trajectory.back().position(), r});
  return region;
}

std::vector<Span> ray_region_spans(const Ray& ray, const Region& region,
                                   double max_range) {
  const Vec2 o = ray.origin;
  const Vec2 d = ray.dir();
  std::vector<Span> spans;
  spans.reserve(region.primitives().size());
  for (const auto& prim : region.primitives()) {
    auto s = ray_span(prim, o, d);
    if (!s) continue;
    const double t0 = std::max(s->t0, 0.0);
    const double t1 = std::min(s->t1, max_range);
    if (t1 - t0 < kTinyLen) continue;
    spans.push_back(Span{t0, t1});
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.t0 < b.t0; });
  std::vector<Span> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.t0 <= merged.back().t1 + kTinyLen) {
      merged.back().t1 = std::max(merged.back().t1, s.t1);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

RayHits ray_region_distances(const Ray& ray, const Region& region,
                             double max_range) {
  const auto spans = ray_region_spans(ray, region, max_range);
  RayHits hits;
  if (spans.empty()) return hits;
  hits.first_hit = spans.front().t0;
  hits.last_exit = spans.back().t1;
  return hits;
}

}  // namespace hnav
