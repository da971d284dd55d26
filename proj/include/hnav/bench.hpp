#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hnav/nav.hpp"
#include "hnav/sim.hpp"

namespace hnav {

struct WorldGenParams {
  uint64_t seed = 0;
  double course_length = 8.0;  // m
  double corridor_width = 3.0;
  double density = 0.4;  // discs per m^2
  double radius_min = 0.1;
  double radius_max = 0.2;
  double clearance = 0.5;  // keep-out around start and goal
};

/// Seeded corridor course: start at one end, goal at the other, discs
/// scattered at the given density. Re-rolls with a fresh sub-seed until the
/// course is plannable; throws Infeasible after 100 attempts.
World generate_world(const WorldGenParams& params);

struct Arm {
  std::string name;
  NavConfig config;
};

struct ArmStats {
  std::string name;
  double mean_time = std::numeric_limits<double>::infinity();  // finite runs only
  double std_time = 0.0;  // population std over finite runs
  double success_rate = 0.0;
  int collisions = 0;
  int failures = 0;
  int episodes = 0;
};

struct SuiteReport {
  std::vector<std::string> arm_names;
  std::vector<std::vector<EpisodeResult>> results;  // [arm][world]
  double timeout = 60.0;
};

SuiteReport run_suite(const std::vector<World>& worlds, const std::vector<Arm>& arms,
                      double timeout, int workers = 1);

ArmStats aggregate_arm(const std::string& name, const std::vector<EpisodeResult>& results);

/// Text table of mean +/- std time, success rate, collisions and failures.
std::string render_table(const SuiteReport& report);

/// One row per episode for external plotting.
std::string render_csv(const SuiteReport& report);

}  // namespace hnav
