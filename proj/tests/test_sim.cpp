#include <doctest.h>

#include <cmath>

#include "hnav/rng.hpp"
#include "hnav/sim.hpp"
#include "test_support.hpp"

using namespace hnav;
using hnav::test::march_beam;
using hnav::test::mirror_x;

namespace {

World empty_world(double half = 50.0) {
  World w;
  w.bounds = AxisBounds{-half, -half, half, half};
  return w;
}

}  // namespace

TEST_CASE("integrate_unicycle examples") {
  const Limits limits;

  RobotState s1;
  s1.v = 1.0;
  const RobotState r1 = integrate_unicycle(s1, Command{1.0, 0.0}, 0.1, limits);
  CHECK(r1.pose.x == doctest::Approx(0.1));
  CHECK(r1.pose.y == doctest::Approx(0.0));
  CHECK(r1.pose.psi == doctest::Approx(0.0));

  // Pure rotation at omega = pi/2 held; bounds widened to admit pi/2.
  Limits wide = limits;
  wide.omega_max = 2.0;
  RobotState s2;
  s2.omega = M_PI / 2;
  const RobotState r2 = integrate_unicycle(s2, Command{0.0, M_PI / 2}, 0.1, wide);
  CHECK(r2.pose.psi == doctest::Approx(M_PI / 20));
  CHECK(r2.pose.x == doctest::Approx(0.0));
  CHECK(r2.pose.y == doctest::Approx(0.0));

  RobotState s3;
  const RobotState r3 = integrate_unicycle(s3, Command{1.0, 0.0}, 0.1, limits);
  CHECK(r3.v == doctest::Approx(0.2));  // a_v * dt = 2.0 * 0.1
}

TEST_CASE("integrate_unicycle is deterministic and clamps accelerations") {
  const Limits limits;
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    RobotState s;
    s.pose = Configuration{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3)};
    s.v = rng.uniform(limits.v_min, limits.v_max);
    s.omega = rng.uniform(-limits.omega_max, limits.omega_max);
    const Command cmd{rng.uniform(-0.5, 1.5), rng.uniform(-2, 2)};
    const double dt = rng.uniform(0.01, 0.1);
    const RobotState a = integrate_unicycle(s, cmd, dt, limits);
    const RobotState b = integrate_unicycle(s, cmd, dt, limits);
    CHECK(a.pose.x == b.pose.x);
    CHECK(a.pose.y == b.pose.y);
    CHECK(a.v == b.v);
    CHECK(std::abs(a.v - s.v) <= limits.accel_v * dt + 1e-12);
    CHECK(std::abs(a.omega - s.omega) <= limits.accel_omega * dt + 1e-12);
    CHECK(a.v >= limits.v_min);
    CHECK(a.v <= limits.v_max);
    CHECK(std::abs(a.omega) <= limits.omega_max);
  }
}

TEST_CASE("closed-form arc matches small-step integration") {
  Configuration c{0.2, -0.1, 0.4};
  const double v = 0.7, w = 1.1, dt = 0.4;
  const Configuration arc = advance_arc(c, v, w, dt);
  Configuration fine = c;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double mid = fine.psi + 0.5 * w * (dt / n);  // midpoint rule
    fine.x += v * (dt / n) * std::cos(mid);
    fine.y += v * (dt / n) * std::sin(mid);
    fine.psi += w * (dt / n);
  }
  CHECK(arc.x == doctest::Approx(fine.x).epsilon(1e-6));
  CHECK(arc.y == doctest::Approx(fine.y).epsilon(1e-6));
}

TEST_CASE("lidar_scan examples") {
  const SensorConfig cfg;

  // Empty world, far from walls: everything at max range.
  const Scan s1 = lidar_scan(empty_world(), Configuration{0, 0, 0}, cfg);
  for (double r : s1.ranges) CHECK(r == doctest::Approx(1.0));

  // Disc dead ahead: center beam reads 0.4.
  World w2 = empty_world();
  w2.obstacles.add(Disc{{0.5, 0}, 0.1});
  const Scan s2 = lidar_scan(w2, Configuration{0, 0, 0}, cfg);
  // 720 beams over 270 degrees: no beam sits exactly on the axis, so check
  // the two straddling the heading and the marching oracle.
  const int mid_lo = cfg.beam_count / 2 - 1;
  const int mid_hi = cfg.beam_count / 2;
  CHECK(s2.ranges[mid_lo] == doctest::Approx(0.4).epsilon(1e-4));
  CHECK(s2.ranges[mid_hi] == doctest::Approx(0.4).epsilon(1e-4));
  const double oracle = march_beam(w2, {0, 0}, cfg.beam_rel_angle(mid_hi), 1.0);
  CHECK(std::abs(s2.ranges[mid_hi] - oracle) < 1e-3);

  // Same disc directly behind: outside the 270-degree field of view.
  World w3 = empty_world();
  w3.obstacles.add(Disc{{-0.5, 0}, 0.1});
  const Scan s3 = lidar_scan(w3, Configuration{0, 0, 0}, cfg);
  for (double r : s3.ranges) CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("lidar_scan sees bounds walls") {
  const SensorConfig cfg;
  World w = empty_world(0.5);  // walls at +/-0.5
  const Scan s = lidar_scan(w, Configuration{0, 0, 0}, cfg);
  CHECK(s.ranges[cfg.beam_count / 2] == doctest::Approx(0.5).epsilon(1e-3));
  // Diagonal beams reach sqrt(0.5^2+0.5^2) ~ 0.707 toward the corners.
  double max_seen = 0.0;
  for (double r : s.ranges) max_seen = std::max(max_seen, r);
  CHECK(max_seen <= std::sqrt(2.0) * 0.5 + 1e-9);
}

TEST_CASE("lidar_scan agrees with the marching oracle on random worlds") {
  Rng rng(77);
  SensorConfig cfg;
  cfg.beam_count = 24;  // keep the oracle affordable
  for (int scene = 0; scene < 40; ++scene) {
    World w = empty_world(2.0);
    const int discs = 1 + static_cast<int>(rng.uniform_index(4));
    for (int i = 0; i < discs; ++i) {
      w.obstacles.add(Disc{{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)},
                           rng.uniform(0.05, 0.4)});
    }
    Configuration pose{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-M_PI, M_PI)};
    if (w.obstacles.distance(pose.position()) < 1e-3) continue;  // grazing start
    const Scan scan = lidar_scan(w, pose, cfg);
    for (int b = 0; b < cfg.beam_count; ++b) {
      const double oracle =
          march_beam(w, pose.position(), pose.psi + cfg.beam_rel_angle(b), cfg.max_range);
      CHECK(std::abs(scan.ranges[b] - oracle) < 1e-3);
    }
  }
}

TEST_CASE("scan monotonicity: more obstacles, never longer ranges") {
  Rng rng(78);
  SensorConfig cfg;
  cfg.beam_count = 72;
  for (int rep = 0; rep < 30; ++rep) {
    World w = empty_world(3.0);
    for (int i = 0; i < 3; ++i) {
      w.obstacles.add(Disc{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.1, 0.4)});
    }
    const Configuration pose{rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-M_PI, M_PI)};
    const Scan before = lidar_scan(w, pose, cfg);
    World w2 = w;
    w2.obstacles.add(Disc{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.1, 0.5)});
    const Scan after = lidar_scan(w2, pose, cfg);
    for (int b = 0; b < cfg.beam_count; ++b) {
      CHECK(after.ranges[b] <= before.ranges[b] + 1e-12);
    }
  }
}

TEST_CASE("mirror equivariance reverses the scan exactly") {
  SensorConfig cfg;
  cfg.beam_count = 720;
  World w = empty_world(2.0);
  w.obstacles.add(Disc{{0.6, 0.3}, 0.2});
  w.obstacles.add(Disc{{0.2, -0.5}, 0.15});
  w.obstacles.add(Stadium{{-0.5, 0.1}, {0.4, 0.8}, 0.1});
  const Configuration pose{0.05, -0.1, 0.7};

  World wm = w;
  wm.obstacles = mirror_x(w.obstacles);
  const Configuration pose_m = mirror_x(pose);

  const Scan a = lidar_scan(w, pose, cfg);
  const Scan b = lidar_scan(wm, pose_m, cfg);
  for (int i = 0; i < cfg.beam_count; ++i) {
    CHECK(a.ranges[i] == b.ranges[cfg.beam_count - 1 - i]);
  }
}

TEST_CASE("in_collision examples") {
  const World w1 = empty_world();
  CHECK_FALSE(in_collision(w1, Configuration{0, 0, 0}, 0.25));

  World w2 = empty_world();
  w2.obstacles.add(Disc{{0.3, 0}, 0.1});
  CHECK(in_collision(w2, Configuration{0, 0, 0}, 0.25));  // 0.3 < 0.35

  World w3 = empty_world();
  w3.obstacles.add(Disc{{0.35, 0}, 0.1});
  // Tangent contact: strict interior rule says no collision.
  CHECK_FALSE(in_collision(w3, Configuration{0, 0, 0}, 0.25));

  // Poking out of bounds counts.
  CHECK(in_collision(w1, Configuration{49.9, 0, 0}, 0.25));
}

TEST_CASE("world json round trip and validation") {
  World w;
  w.bounds = AxisBounds{0, -1.5, 8, 1.5};
  w.obstacles.add(Disc{{2.0, 0.5}, 0.2});
  w.start = Configuration{0.5, 0, 0};
  w.goal = Configuration{7.5, 0, 0};
  const std::string text = world_to_json(w);
  const World w2 = world_from_json(text);
  CHECK(w2.bounds.xmax == doctest::Approx(8.0));
  CHECK(w2.obstacles.primitives().size() == 1);
  CHECK(w2.goal.x == doctest::Approx(7.5));
  CHECK(world_to_json(w2) == text);

  CHECK_THROWS_AS(world_from_json("{\"bounds\":{}}"), ConfigError);
  // Unknown fields rejected.
  std::string extra = text;
  extra.insert(extra.find("\"bounds\""), "\"extra\": 1, ");
  CHECK_THROWS_AS(world_from_json(extra), ConfigError);
  // Obstacle outside bounds rejected.
  World bad = w;
  bad.obstacles.add(Disc{{7.9, 1.4}, 0.3});
  CHECK_THROWS_AS(world_from_json(world_to_json(bad)), ConfigError);
}
