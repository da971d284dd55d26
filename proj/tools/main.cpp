#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hnav/bench.hpp"
#include "hnav/explore.hpp"
#include "hnav/halluc.hpp"
#include "hnav/io.hpp"
#include "hnav/model.hpp"
#include "hnav/nav.hpp"

namespace fs = std::filesystem;
using namespace hnav;

namespace {

// Exit codes: 0 ok, 2 invalid config, 3 infeasible world / no path,
// 4 training divergence.
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDivergence = 4;

PlannerKind parse_planner(const std::string& name) {
  if (name == "hlsd") return PlannerKind::kHlsd;
  if (name == "lfh") return PlannerKind::kLfh;
  if (name == "dwa") return PlannerKind::kDwa;
  throw ConfigError("unknown planner: " + name);
}

std::vector<fs::path> sorted_world_files(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no .json world files in " + dir);
  return files;
}

int run(int argc, char** argv) {
  CLI::App app{"2D navigation workbench: hallucinated training data for local planners"};
  app.require_subcommand(1);

  // explore
  auto* explore = app.add_subcommand("explore", "collect an obstacle-free exploration run");
  ExplorationParams ep;
  std::string explore_preset = "varying";
  std::string explore_out = "raw.jsonl";
  explore->add_option("--seed", ep.seed, "rng seed");
  explore->add_option("--duration", ep.duration, "seconds of simulated time")
      ->default_val(505.0);
  explore->add_option("--preset", explore_preset, "varying | constant04")
      ->check(CLI::IsMember({"varying", "constant04"}));
  explore->add_option("--hold-probability", ep.hold_probability,
                      "per-step probability of keeping a reached target");
  explore->add_option("--out", explore_out, "output JSONL path");

  // hallucinate
  auto* halluc = app.add_subcommand("hallucinate", "synthesize a training set from a raw run");
  std::string halluc_raw, halluc_out = "train.jsonl", halluc_mode = "minimal";
  HallucinationParams hp;
  uint64_t halluc_seed = 0;
  halluc->add_option("--raw", halluc_raw, "raw JSONL input")->required();
  halluc->add_option("--mode", halluc_mode, "minimal | most-constrained")
      ->check(CLI::IsMember({"minimal", "most-constrained"}));
  halluc->add_option("--sampling-count", hp.sampling_count, "samples per window")
      ->default_val(10);
  halluc->add_option("--alpha", hp.alpha, "neighboring-beam smoothing")->default_val(0.48);
  halluc->add_option("--seed", halluc_seed, "rng seed");
  halluc->add_option("--out", halluc_out, "output JSONL path");

  // train
  auto* train_cmd = app.add_subcommand("train", "fit the local planner on a training set");
  std::string train_data, train_out = "weights.bin";
  Hyper hyper;
  bool no_vel_input = false;
  train_cmd->add_option("--data", train_data, "training JSONL")->required();
  train_cmd->add_option("--epochs", hyper.epochs, "epochs")->default_val(50);
  train_cmd->add_option("--lr", hyper.learning_rate, "learning rate")->default_val(1e-3);
  train_cmd->add_option("--batch", hyper.batch_size, "batch size")->default_val(128);
  train_cmd->add_option("--seed", hyper.seed, "rng seed");
  train_cmd->add_flag("--no-vel-input", no_vel_input,
                      "drop current velocities from the input features");
  train_cmd->add_option("--out", train_out, "weights output path");

  // genworlds
  auto* gen = app.add_subcommand("genworlds", "generate benchmark corridor worlds");
  WorldGenParams wg;
  int gen_count = 30;
  std::string gen_out = "worlds";
  gen->add_option("--count", gen_count, "number of worlds")->default_val(30);
  gen->add_option("--seed", wg.seed, "rng seed");
  gen->add_option("--density", wg.density, "discs per m^2")->default_val(0.4);
  gen->add_option("--length", wg.course_length, "course length (m)")->default_val(8.0);
  gen->add_option("--width", wg.corridor_width, "corridor width (m)")->default_val(3.0);
  gen->add_option("--radius-min", wg.radius_min, "min disc radius")->default_val(0.1);
  gen->add_option("--radius-max", wg.radius_max, "max disc radius")->default_val(0.2);
  gen->add_option("--out", gen_out, "output directory");

  // navigate
  auto* nav = app.add_subcommand("navigate", "run one episode in a world");
  std::string nav_world, nav_planner = "dwa", nav_weights, nav_trace;
  double nav_timeout = 60.0;
  double nav_speed_cap = 0.0;
  nav->add_option("--world", nav_world, "world JSON file")->required();
  nav->add_option("--planner", nav_planner, "hlsd | lfh | dwa")
      ->check(CLI::IsMember({"hlsd", "lfh", "dwa"}));
  nav->add_option("--weights", nav_weights, "weights file (learned planners)");
  nav->add_option("--timeout", nav_timeout, "sim-time budget (s)")->default_val(60.0);
  nav->add_option("--speed-cap", nav_speed_cap, "cap the commanded v (0 = none)");
  nav->add_option("--trace", nav_trace, "write a per-step JSONL trace");

  // bench
  auto* bench = app.add_subcommand("bench", "run a planner suite over a world set");
  std::string bench_worlds, bench_arms, bench_out = "report";
  double bench_timeout = 60.0;
  int bench_workers = 1;
  bench->add_option("--worlds", bench_worlds, "directory of world JSON files")->required();
  bench->add_option("--arms", bench_arms, "arms JSON file")->required();
  bench->add_option("--timeout", bench_timeout, "per-episode budget (s)")->default_val(60.0);
  bench->add_option("--workers", bench_workers, "episode worker threads")->default_val(1);
  bench->add_option("--out", bench_out, "report output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*explore) {
    ep.preset = explore_preset == "constant04" ? ExplorationParams::Preset::kConstant04
                                               : ExplorationParams::Preset::kVarying;
    const auto records = run_exploration(ep);
    write_file(explore_out, raw_records_to_jsonl(records, ep));
    std::printf("wrote %zu records to %s\n", records.size(), explore_out.c_str());
    return 0;
  }

  if (*halluc) {
    const std::string raw_text = read_file(halluc_raw);
    const auto records = raw_records_from_jsonl(raw_text);
    const std::string digest = fnv1a_hex(raw_text);
    const SensorConfig cfg;
    std::vector<TrainSample> samples;
    if (halluc_mode == "most-constrained") {
      samples = synthesize_most_constrained(records, cfg, hp);
    } else {
      samples = synthesize_dataset(records, cfg, hp, halluc_seed);
    }
    write_file(halluc_out, train_samples_to_jsonl(samples, hp, digest, halluc_mode));
    std::printf("wrote %zu samples to %s\n", samples.size(), halluc_out.c_str());
    return 0;
  }

  if (*train_cmd) {
    const std::string text = read_file(train_data);
    const auto samples = train_samples_from_jsonl(text);
    hyper.use_vel_input = !no_vel_input;
    const auto result = train(samples, hyper);
    write_file(train_out, weights_to_bytes(result.net, hyper, fnv1a_hex(text)));
    std::printf("trained on %zu samples, final loss %.6g, wrote %s\n", samples.size(),
                result.epoch_loss.back(), train_out.c_str());
    return 0;
  }

  if (*gen) {
    fs::create_directories(gen_out);
    for (int i = 0; i < gen_count; ++i) {
      WorldGenParams p = wg;
      p.seed = mix_seed(wg.seed, static_cast<uint64_t>(i) + 1000);
      const World w = generate_world(p);
      char name[32];
      std::snprintf(name, sizeof(name), "w%03d.json", i);
      write_file((fs::path(gen_out) / name).string(), world_to_json(w));
    }
    std::printf("wrote %d worlds to %s\n", gen_count, gen_out.c_str());
    return 0;
  }

  if (*nav) {
    const World world = world_from_json(read_file(nav_world));
    NavConfig config;
    config.kind = parse_planner(nav_planner);
    Mlp net;
    if (config.kind != PlannerKind::kDwa) {
      if (nav_weights.empty()) throw ConfigError("navigate: --weights required");
      net = weights_from_bytes(read_file(nav_weights));
      config.net = &net;
    }
    if (nav_speed_cap > 0.0) config.speed_cap = nav_speed_cap;
    std::vector<TraceStep> trace;
    const EpisodeResult r =
        navigate_episode(world, config, nav_timeout, nav_trace.empty() ? nullptr : &trace);
    if (!nav_trace.empty()) write_file(nav_trace, trace_to_jsonl(trace));
    std::printf("success=%d time=%s collisions=%d recoveries=%d path_length=%.3f\n",
                r.success ? 1 : 0, r.success ? format_double(r.time, 3).c_str() : "inf",
                r.collisions, r.recovery_invocations, r.path_length);
    return r.success ? 0 : kExitInfeasible;
  }

  if (*bench) {
    const auto arm_spec = nlohmann::json::parse(read_file(bench_arms));
    std::vector<Mlp> nets;
    nets.reserve(arm_spec.size());
    std::vector<Arm> arms;
    for (const auto& a : arm_spec) {
      Arm arm;
      arm.name = a.at("name").get<std::string>();
      arm.config.kind = parse_planner(a.at("planner").get<std::string>());
      if (arm.config.kind != PlannerKind::kDwa) {
        nets.push_back(weights_from_bytes(read_file(a.at("weights").get<std::string>())));
        arm.config.net = &nets.back();
      }
      if (a.contains("speed_cap")) arm.config.speed_cap = a.at("speed_cap").get<double>();
      arms.push_back(std::move(arm));
    }
    std::vector<World> worlds;
    for (const auto& f : sorted_world_files(bench_worlds)) {
      worlds.push_back(world_from_json(read_file(f.string())));
    }
    const SuiteReport report = run_suite(worlds, arms, bench_timeout, bench_workers);
    fs::create_directories(bench_out);
    const std::string table = render_table(report);
    write_file((fs::path(bench_out) / "table.txt").string(), table);
    write_file((fs::path(bench_out) / "results.csv").string(), render_csv(report));
    std::printf("%s", table.c_str());
    return 0;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NoPath& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const NonFiniteLoss& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
