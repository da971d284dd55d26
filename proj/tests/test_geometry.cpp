#include <doctest.h>

#include <cmath>

#include "hnav/geometry.hpp"
#include "hnav/rng.hpp"
#include "test_support.hpp"

using namespace hnav;
using hnav::test::march_ray;
using hnav::test::mirror_x;
using hnav::test::random_region;

namespace {
Configuration cfg(double x, double y, double psi = 0.0) { return {x, y, psi}; }
}  // namespace

TEST_CASE("reflect_across_chord basic cases") {
  // Across the x-axis.
  const Vec2 r1 = reflect_across_chord(cfg(0, 0), cfg(2, 0), cfg(1, 0.4));
  CHECK(r1.x == doctest::Approx(1.0));
  CHECK(r1.y == doctest::Approx(-0.4));

  // A point on the chord is a fixed point.
  const Vec2 r2 = reflect_across_chord(cfg(0, 0), cfg(2, 0), cfg(1, 0));
  CHECK(r2.x == doctest::Approx(1.0));
  CHECK(r2.y == doctest::Approx(0.0).epsilon(1e-12));

  // Across the y-axis.
  const Vec2 r3 = reflect_across_chord(cfg(0, 0), cfg(0, 2), cfg(0.3, 1));
  CHECK(r3.x == doctest::Approx(-0.3));
  CHECK(r3.y == doctest::Approx(1.0));
}

TEST_CASE("reflect_across_chord rejects a degenerate chord") {
  CHECK_THROWS_AS(reflect_across_chord(cfg(1, 1), cfg(1, 1), cfg(0, 0)), DegenerateChord);
}

TEST_CASE("reflection is an involution") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Configuration a = cfg(rng.uniform(-2, 2), rng.uniform(-2, 2));
    Configuration b = cfg(rng.uniform(-2, 2), rng.uniform(-2, 2));
    if (dist(a.position(), b.position()) < 1e-6) b.x += 1.0;
    const Configuration m = cfg(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec2 once = reflect_across_chord(a, b, m);
    const Vec2 twice = reflect_across_chord(a, b, cfg(once.x, once.y));
    CHECK(std::abs(twice.x - m.x) < 1e-12);
    CHECK(std::abs(twice.y - m.y) < 1e-12);
  }
}

TEST_CASE("circle_through_three_points examples") {
  // Derived by intersecting perpendicular bisectors analytically:
  // x = 1, 1 + cy^2 = (cy + 0.4)^2 -> cy = 1.05, R = sqrt(1 + 1.05^2) = 1.45.
  const auto c1 = circle_through_three_points({0, 0}, {1, -0.4}, {2, 0});
  REQUIRE(c1.has_value());
  CHECK(c1->center.x == doctest::Approx(1.0));
  CHECK(c1->center.y == doctest::Approx(1.05));
  CHECK(c1->radius == doctest::Approx(1.45));

  CHECK_FALSE(circle_through_three_points({0, 0}, {1, 0}, {2, 0}).has_value());

  // Right triangle: hypotenuse is the diameter.
  const auto c3 = circle_through_three_points({0, 0}, {0, 2}, {2, 0});
  REQUIRE(c3.has_value());
  CHECK(c3->center.x == doctest::Approx(1.0));
  CHECK(c3->center.y == doctest::Approx(1.0));
  CHECK(c3->radius == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("circumcircle is equidistant from its three points") {
  Rng rng(11);
  int produced = 0;
  while (produced < 200) {
    const Vec2 a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 c{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto circle = circle_through_three_points(a, b, c);
    if (!circle) continue;
    ++produced;
    for (const Vec2& p : {a, b, c}) {
      CHECK(std::abs(dist(circle->center, p) - circle->radius) < 1e-9);
    }
  }
}

TEST_CASE("swept_corridor shapes") {
  // Single configuration: a disc.
  const Region r1 = swept_corridor({cfg(0, 0)}, 0.25);
  REQUIRE(r1.primitives().size() == 1);
  CHECK(std::holds_alternative<Disc>(r1.primitives()[0]));
  CHECK(r1.contains({0.2, 0}));
  CHECK_FALSE(r1.contains({0.3, 0}));

  // Straight trajectory: a stadium (Minkowski sum of segment and disc).
  const Region r2 = swept_corridor({cfg(0, 0), cfg(2, 0)}, 0.25);
  CHECK(r2.contains({1.0, 0.24}));
  CHECK(r2.contains({2.2, 0.0}));
  CHECK_FALSE(r2.contains({1.0, 0.26}));

  // L-shaped two-segment trajectory; the joint corner stays covered.
  const Region r3 = swept_corridor({cfg(0, 0), cfg(1, 0), cfg(1, 1)}, 0.25);
  CHECK(r3.contains({1.0, 0.2}));  // offset 0.2 < r at the joint
  CHECK(r3.contains({1.14, 0.14}));
  CHECK_FALSE(r3.contains({0.5, 0.3}));

  CHECK_THROWS_AS(swept_corridor({}, 0.25), EmptyTrajectory);
}

TEST_CASE("swept_corridor membership properties") {
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Configuration> traj;
    Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (int i = 0; i < 6; ++i) {
      traj.push_back(cfg(p.x, p.y));
      p = p + Vec2{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    }
    const double r = rng.uniform(0.1, 0.4);
    const Region corridor = swept_corridor(traj, r);
    // Every trajectory point is inside.
    for (const auto& c : traj) CHECK(corridor.contains(c.position()));
    // Points farther than r from the polyline are outside.
    for (int probe = 0; probe < 20; ++probe) {
      const Vec2 q{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      double min_d = 1e30;
      for (size_t i = 0; i + 1 < traj.size(); ++i) {
        const Vec2 a = traj[i].position();
        const Vec2 b = traj[i + 1].position();
        const Vec2 ab = b - a;
        const double len2 = ab.norm2();
        const double t = len2 > 0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        min_d = std::min(min_d, dist(q, a + ab * t));
      }
      if (min_d > r + 1e-9) CHECK_FALSE(corridor.contains(q));
      if (min_d < r - 1e-9) CHECK(corridor.contains(q));
    }
  }
}

TEST_CASE("ray_region_distances examples") {
  Region disc;
  disc.add(Disc{{0.5, 0}, 0.1});
  const auto h1 = ray_region_distances(Ray{{0, 0}, 0.0}, disc, 2.0);
  REQUIRE(h1.first_hit.has_value());
  CHECK(*h1.first_hit == doctest::Approx(0.4));

  Region stadium;
  stadium.add(Stadium{{0, 0}, {2, 0}, 0.25});
  const auto h2 = ray_region_distances(Ray{{0, 0}, M_PI / 2}, stadium, 2.0);
  REQUIRE(h2.last_exit.has_value());
  CHECK(*h2.last_exit == doctest::Approx(0.25));

  // 0.25 / sin(30 deg) = 0.5; cross-checked against the marching oracle.
  const auto h3 = ray_region_distances(Ray{{0, 0}, M_PI / 6}, stadium, 2.0);
  REQUIRE(h3.last_exit.has_value());
  CHECK(*h3.last_exit == doctest::Approx(0.5));
  const auto m3 = march_ray(Ray{{0, 0}, M_PI / 6}, stadium, 2.0);
  REQUIRE(m3.last_exit.has_value());
  CHECK(std::abs(*h3.last_exit - *m3.last_exit) < 1e-3);
}

TEST_CASE("ray through overlapping primitives merges spans") {
  Region region;
  region.add(Disc{{0.5, 0}, 0.2});
  region.add(Disc{{0.8, 0}, 0.2});
  region.add(Disc{{2.0, 0}, 0.3});
  const auto h = ray_region_distances(Ray{{0, 0}, 0.0}, region, 5.0);
  REQUIRE(h.first_hit.has_value());
  REQUIRE(h.last_exit.has_value());
  CHECK(*h.first_hit == doctest::Approx(0.3));
  CHECK(*h.last_exit == doctest::Approx(2.3));
}

TEST_CASE("ray_region_distances agrees with the marching oracle") {
  Rng rng(101);
  int compared = 0;
  for (int scene = 0; scene < 300; ++scene) {
    const Region region = random_region(rng);
    const Ray ray{{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)},
                  rng.uniform(-M_PI, M_PI)};
    const double max_range = 2.0;
    const auto got = ray_region_distances(ray, region, max_range);
    const auto want = march_ray(ray, region, max_range);
    if (got.first_hit.has_value() != want.first_hit.has_value()) {
      // Grazing hits thinner than the marching step are legitimate
      // disagreements; anything wider is a bug.
      if (got.first_hit && got.last_exit) {
        CHECK(*got.last_exit - *got.first_hit < 2e-4);
      }
      continue;
    }
    if (got.first_hit) {
      CHECK(std::abs(*got.first_hit - *want.first_hit) < 1e-3);
      CHECK(std::abs(*got.last_exit - *want.last_exit) < 1e-3);
      ++compared;
    }
  }
  CHECK(compared > 100);  // the scenes actually exercised intersections
}

TEST_CASE("first_hit <= last_exit whenever both exist") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const Region region = random_region(rng, 3);
    const Ray ray{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-M_PI, M_PI)};
    const auto h = ray_region_distances(ray, region, 3.0);
    if (h.first_hit && h.last_exit) CHECK(*h.first_hit <= *h.last_exit);
    CHECK(h.first_hit.has_value() == h.last_exit.has_value());
  }
}

TEST_CASE("mirror equivariance of circle and corridor outputs") {
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const Vec2 a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec2 b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec2 c{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto orig = circle_through_three_points(a, b, c);
    const auto flip = circle_through_three_points({a.x, -a.y}, {b.x, -b.y}, {c.x, -c.y});
    REQUIRE(orig.has_value() == flip.has_value());
    if (!orig) continue;
    // Exact: the arithmetic is sign-symmetric in y.
    CHECK(flip->center.x == orig->center.x);
    CHECK(flip->center.y == -orig->center.y);
    CHECK(flip->radius == orig->radius);
  }

  std::vector<Configuration> traj{cfg(0, 0, 0.3), cfg(0.5, 0.2, 0.4), cfg(1.0, 0.1, 0.1)};
  std::vector<Configuration> traj_m;
  for (const auto& c : traj) traj_m.push_back(mirror_x(c));
  const Region r = swept_corridor(traj, 0.25);
  const Region rm = swept_corridor(traj_m, 0.25);
  Rng rng2(42);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{rng2.uniform(-1, 2), rng2.uniform(-1, 1)};
    CHECK(r.contains(p) == rm.contains({p.x, -p.y}));
  }
}

TEST_CASE("region depth is exact for discs and stadiums") {
  Region region;
  region.add(Disc{{0, 0}, 0.5});
  CHECK(region.depth({0.3, 0}) == doctest::Approx(0.2));
  CHECK(region.depth({0.7, 0}) == doctest::Approx(-0.2));

  Region corridor;
  corridor.add(Stadium{{0, 0}, {1, 0}, 0.25});
  CHECK(corridor.depth({0.5, 0.1}) == doctest::Approx(0.15));
  CHECK(corridor.depth({0.5, 0.3}) == doctest::Approx(-0.05));
}

TEST_CASE("circular segment membership and depth") {
  // Segment below the chord y=0 of the circle centered (1, 1.05), R=1.45.
  const CircularSegment seg{{1.0, 1.05}, 1.45, {0, 0}, {2, 0}, -1};
  Region region;
  region.add(seg);
  CHECK(region.contains({1.0, -0.2}));
  CHECK(region.contains({1.0, -0.39}));  // just inside the mirrored-midpoint arc
  CHECK(std::abs(region.depth({1.0, -0.4})) < 1e-9);  // the arc itself
  CHECK_FALSE(region.contains({1.0, 0.2}));    // wrong side
  CHECK_FALSE(region.contains({1.0, -0.45}));  // outside the circle
  CHECK(region.depth({1.0, -0.2}) == doctest::Approx(0.2));

  // Chord endpoints must lie on the circle.
  Region bad;
  CHECK_THROWS_AS(bad.add(CircularSegment{{0, 0}, 1.0, {0.5, 0}, {1, 0}, 1}),
                  BoundsViolation);
}
