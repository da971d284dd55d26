#include <doctest.h>

#include <cmath>

#include "hnav/explore.hpp"
#include "hnav/io.hpp"

using namespace hnav;

TEST_CASE("pi_rand_step keeps the target while approaching it") {
  ExplorationParams params;
  Rng rng(1);
  RobotState state;  // at rest, far from the target below
  const VelocityTarget target{0.8, 1.0};
  const auto [cmd, next] = pi_rand_step(rng, state, target, params);
  CHECK(cmd.v == target.v);
  CHECK(cmd.omega == target.omega);
  CHECK(next.v == target.v);
  CHECK(next.omega == target.omega);
}

TEST_CASE("pi_rand target sequence is seed-deterministic") {
  ExplorationParams params;
  params.seed = 42;
  params.duration = 10.0;
  const auto a = run_exploration(params);
  const auto b = run_exploration(params);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].v == b[i].v);
    CHECK(a[i].omega == b[i].omega);
  }
}

TEST_CASE("sampled targets stay inside the command box") {
  ExplorationParams params;
  Rng rng(3);
  double v_lo = 1e9, v_hi = -1e9, w_lo = 1e9, w_hi = -1e9;
  for (int i = 0; i < 100000; ++i) {
    const VelocityTarget t = draw_target(rng, params);
    v_lo = std::min(v_lo, t.v);
    v_hi = std::max(v_hi, t.v);
    w_lo = std::min(w_lo, t.omega);
    w_hi = std::max(w_hi, t.omega);
  }
  CHECK(v_lo >= 0.0);
  CHECK(v_hi <= 1.0);
  CHECK(w_lo >= -1.57);
  CHECK(w_hi <= 1.57);
  // The draws actually cover the box.
  CHECK(v_hi - v_lo > 0.99);
  CHECK(w_hi - w_lo > 3.1);
}

TEST_CASE("run_exploration record counts") {
  ExplorationParams p1;
  p1.duration = 505.0;
  p1.seed = 42;
  const auto long_run = run_exploration(p1);
  CHECK(long_run.size() == 12625);  // duration * 25 Hz

  ExplorationParams p2;
  p2.duration = 1.0;
  CHECK(run_exploration(p2).size() == 25);
}

TEST_CASE("505 s varying run covers every v decile") {
  ExplorationParams params;
  params.seed = 42;
  const auto records = run_exploration(params);
  int deciles[10] = {0};
  for (const auto& r : records) {
    const int bin = std::min(9, static_cast<int>(r.v * 10.0));
    if (r.v >= 0.0) ++deciles[bin];
  }
  for (int i = 0; i < 10; ++i) CHECK(deciles[i] > 0);
}

TEST_CASE("constant04 preset pins the linear target") {
  ExplorationParams params;
  params.preset = ExplorationParams::Preset::kConstant04;
  params.seed = 9;
  params.duration = 120.0;
  const auto records = run_exploration(params);
  // After spin-up the speed sits at 0.4 whenever omega is steady.
  int near = 0;
  for (size_t i = 100; i < records.size(); ++i) {
    if (std::abs(records[i].v - 0.4) < 0.05) ++near;
  }
  CHECK(near > static_cast<int>(0.9 * (records.size() - 100)));
}

TEST_CASE("recorded velocities obey acceleration limits between records") {
  ExplorationParams params;
  params.seed = 7;
  params.duration = 60.0;
  const auto records = run_exploration(params);
  const Limits limits;
  for (size_t i = 1; i < records.size(); ++i) {
    CHECK(std::abs(records[i].v - records[i - 1].v) <= limits.accel_v * kControlDt + 1e-12);
    CHECK(std::abs(records[i].omega - records[i - 1].omega) <=
          limits.accel_omega * kControlDt + 1e-12);
    CHECK(records[i].t > records[i - 1].t);
  }
}

TEST_CASE("raw jsonl round trip is byte-stable") {
  ExplorationParams params;
  params.seed = 5;
  params.duration = 5.0;
  const auto records = run_exploration(params);
  const std::string text1 = raw_records_to_jsonl(records, params);
  const std::string text2 = raw_records_to_jsonl(run_exploration(params), params);
  CHECK(text1 == text2);

  const auto back = raw_records_from_jsonl(text1);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(std::abs(back[i].x - records[i].x) < 1e-9);
    CHECK(std::abs(back[i].v - records[i].v) < 1e-9);
  }
  CHECK_THROWS_AS(raw_records_from_jsonl("{\"schema\":\"other\"}\n"), ConfigError);
}
