#include "hnav/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "hnav/io.hpp"
#include "hnav/rng.hpp"

namespace hnav {

World generate_world(const WorldGenParams& params) {
  if (!(params.density >= 0.0) || !(params.radius_min > 0.0) ||
      params.radius_max < params.radius_min) {
    throw ConfigError("generate_world: bad parameters");
  }
  const double area = params.course_length * params.corridor_width;
  const int count = static_cast<int>(std::llround(params.density * area));

  for (uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng(mix_seed(params.seed, attempt));
    World w;
    w.bounds = AxisBounds{0.0, -0.5 * params.corridor_width, params.course_length,
                          0.5 * params.corridor_width};
    w.start = Configuration{0.5, 0.0, 0.0};
    w.goal = Configuration{params.course_length - 0.5, 0.0, 0.0};
    const Vec2 start_p = w.start.position();
    const Vec2 goal_p = w.goal.position();
    for (int i = 0; i < count; ++i) {
      // Rejection sample a disc that fits the bounds and clears the
      // start/goal keep-out discs.
      for (int tries = 0; tries < 1000; ++tries) {
        const double r = rng.uniform(params.radius_min, params.radius_max);
        const double x = rng.uniform(w.bounds.xmin + r, w.bounds.xmax - r);
        const double y = rng.uniform(w.bounds.ymin + r, w.bounds.ymax - r);
        const Vec2 c{x, y};
        if (dist(c, start_p) < params.clearance + r) continue;
        if (dist(c, goal_p) < params.clearance + r) continue;
        w.obstacles.add(Disc{c, r});
        break;
      }
    }
    try {
      plan_global(w);
      return w;
    } catch (const NoPath&) {
      continue;  // next sub-seed
    }
  }
  throw Infeasible("generate_world: no plannable course in 100 attempts");
}

SuiteReport run_suite(const std::vector<World>& worlds, const std::vector<Arm>& arms,
                      double timeout, int workers) {
  SuiteReport report;
  report.timeout = timeout;
  report.results.assign(arms.size(), std::vector<EpisodeResult>(worlds.size()));
  for (const auto& arm : arms) report.arm_names.push_back(arm.name);

  const size_t total = arms.size() * worlds.size();
  std::atomic<size_t> cursor{0};
  const auto worker = [&]() {
    for (;;) {
      const size_t k = cursor.fetch_add(1);
      if (k >= total) return;
      const size_t a = k / worlds.size();
      const size_t w = k % worlds.size();
      report.results[a][w] = navigate_episode(worlds[w], arms[a].config, timeout);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

ArmStats aggregate_arm(const std::string& name,
                       const std::vector<EpisodeResult>& results) {
  ArmStats stats;
  stats.name = name;
  stats.episodes = static_cast<int>(results.size());
  std::vector<double> finite;
  for (const auto& r : results) {
    stats.collisions += r.collisions;
    if (r.success) {
      finite.push_back(r.time);
    } else {
      ++stats.failures;
    }
  }
  if (stats.episodes > 0) {
    stats.success_rate =
        static_cast<double>(stats.episodes - stats.failures) / stats.episodes;
  }
  if (!finite.empty()) {
    double sum = 0.0;
    for (double t : finite) sum += t;
    stats.mean_time = sum / static_cast<double>(finite.size());
    double var = 0.0;
    for (double t : finite) var += (t - stats.mean_time) * (t - stats.mean_time);
    stats.std_time = std::sqrt(var / static_cast<double>(finite.size()));
  }
  return stats;
}

std::string render_table(const SuiteReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %14s %9s %11s %9s\n", "planner",
                "time (s)", "success", "collisions", "failures");
  out += line;
  out += std::string(58, '-') + "\n";
  for (size_t a = 0; a < report.arm_names.size(); ++a) {
    const ArmStats s = aggregate_arm(report.arm_names[a], report.results[a]);
    std::string time_cell;
    if (std::isfinite(s.mean_time)) {
      time_cell = format_double(s.mean_time, 1) + "+/-" + format_double(s.std_time, 1);
    } else {
      time_cell = "inf";
    }
    std::snprintf(line, sizeof(line), "%-12s %14s %8.1f%% %11d %9d\n", s.name.c_str(),
                  time_cell.c_str(), 100.0 * s.success_rate, s.collisions, s.failures);
    out += line;
  }
  return out;
}

std::string render_csv(const SuiteReport& report) {
  std::string out = "arm,world,success,time,collisions,recoveries,path_length\n";
  for (size_t a = 0; a < report.arm_names.size(); ++a) {
    for (size_t w = 0; w < report.results[a].size(); ++w) {
      const EpisodeResult& r = report.results[a][w];
      out += report.arm_names[a] + "," + std::to_string(w) + ",";
      out += r.success ? "1," : "0,";
      out += (r.success ? format_double(r.time, 3) : "inf");
      out += "," + std::to_string(r.collisions);
      out += "," + std::to_string(r.recovery_invocations);
      out += "," + format_double(r.path_length, 3) + "\n";
    }
  }
  return out;
}

}  // namespace hnav
