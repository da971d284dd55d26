#include "hnav/explore.hpp"

#include <cmath>

#include <json.hpp>

#include "hnav/errors.hpp"
#include "hnav/io.hpp"

namespace hnav {

namespace {
constexpr double kVTol = 0.02;
constexpr double kOmegaTol = 0.05;
}  // namespace

VelocityTarget draw_target(Rng& rng, const ExplorationParams& params) {
  VelocityTarget t;
  if (params.preset == ExplorationParams::Preset::kConstant04) {
    t.v = 0.4;
  } else {
    t.v = rng.uniform(params.v_min, params.v_max);
  }
  t.omega = rng.uniform(params.omega_min, params.omega_max);
  return t;
}

std::pair<Command, VelocityTarget> pi_rand_step(Rng& rng, const RobotState& state,
                                                const VelocityTarget& target,
                                                const ExplorationParams& params) {
  VelocityTarget next = target;
  const bool reached = std::abs(state.v - target.v) <= kVTol &&
                       std::abs(state.omega - target.omega) <= kOmegaTol;
  if (reached && rng.uniform01() >= params.hold_probability) {
    next = draw_target(rng, params);
  }
  return {Command{next.v, next.omega}, next};
}

std::vector<RawRecord> run_exploration(const ExplorationParams& params) {
  if (!(params.duration > 0.0)) throw ConfigError("exploration duration must be > 0");
  const auto steps = static_cast<size_t>(std::floor(params.duration * kControlRate));
  Rng rng(params.seed);
  const Limits limits;  // exploration never commands reverse
  RobotState state;
  VelocityTarget target = draw_target(rng, params);
  std::vector<RawRecord> records;
  records.reserve(steps);
  for (size_t k = 0; k < steps; ++k) {
    auto [cmd, next_target] = pi_rand_step(rng, state, target, params);
    target = next_target;
    const RobotState next = integrate_unicycle(state, cmd, kControlDt, limits);
    records.push_back(RawRecord{state.t, state.pose.x, state.pose.y, state.pose.psi,
                                next.v, next.omega});
    state = next;
  }
  return records;
}

std::string raw_records_to_jsonl(const std::vector<RawRecord>& records,
                                 const ExplorationParams& params) {
  nlohmann::json header;
  header["schema"] = "hnav.raw.v1";
  header["params"] = {
      {"v_min", params.v_min},
      {"v_max", params.v_max},
      {"omega_min", params.omega_min},
      {"omega_max", params.omega_max},
      {"hold_probability", params.hold_probability},
      {"seed", params.seed},
      {"duration", params.duration},
      {"preset",
       params.preset == ExplorationParams::Preset::kConstant04 ? "constant04" : "varying"},
  };
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& r : records) {
    out += "{\"t\":" + format_double(r.t, 4);
    out += ",\"x\":" + format_double(r.x, 9);
    out += ",\"y\":" + format_double(r.y, 9);
    out += ",\"psi\":" + format_double(r.psi, 9);
    out += ",\"v\":" + format_double(r.v, 9);
    out += ",\"omega\":" + format_double(r.omega, 9);
    out += "}\n";
  }
  return out;
}

std::vector<RawRecord> raw_records_from_jsonl(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ConfigError("raw dataset: empty file");
  const auto header = nlohmann::json::parse(lines[0]);
  if (!header.contains("schema") || header.at("schema") != "hnav.raw.v1") {
    throw ConfigError("raw dataset: bad or missing schema tag");
  }
  std::vector<RawRecord> records;
  records.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto j = nlohmann::json::parse(lines[i]);
    RawRecord r;
    r.t = j.at("t").get<double>();
    r.x = j.at("x").get<double>();
    r.y = j.at("y").get<double>();
    r.psi = j.at("psi").get<double>();
    r.v = j.at("v").get<double>();
    r.omega = j.at("omega").get<double>();
    records.push_back(r);
  }
  return records;
}

}  // namespace hnav
