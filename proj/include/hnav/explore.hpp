#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hnav/rng.hpp"
#include "hnav/sim.hpp"

namespace hnav {

/// Random exploration policy settings. The "constant04" preset pins the
/// linear-velocity target to 0.4 m/s and randomizes only the angular target.
struct ExplorationParams {
  double v_min = 0.0;
  double v_max = 1.0;
  double omega_min = -1.57;
  double omega_max = 1.57;
  double hold_probability = 0.95;  // per-step, once the target is reached
  uint64_t seed = 0;
  double duration = 505.0;  // seconds

  enum class Preset { kVarying, kConstant04 };
  Preset preset = Preset::kVarying;
};

/// One logged step: pose at time t and the velocity applied over the step
/// starting at t (post-clamp, so consecutive records obey the accel limits).
struct RawRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

struct VelocityTarget {
  double v = 0.0;
  double omega = 0.0;
};

VelocityTarget draw_target(Rng& rng, const ExplorationParams& params);

/// Command the current target; once the measured velocities are within
/// (0.02 m/s, 0.05 rad/s) of it, keep it with hold_probability, otherwise
/// draw a fresh one. Acceleration limiting happens in integrate_unicycle.
std::pair<Command, VelocityTarget> pi_rand_step(Rng& rng, const RobotState& state,
                                                const VelocityTarget& target,
                                                const ExplorationParams& params);

/// Simulate obstacle-free exploration from the origin at 25 Hz for
/// params.duration seconds; returns floor(duration * 25) records.
std::vector<RawRecord> run_exploration(const ExplorationParams& params);

/// JSON Lines with a header line carrying the schema tag and a params echo.
std::string raw_records_to_jsonl(const std::vector<RawRecord>& records,
                                 const ExplorationParams& params);
std::vector<RawRecord> raw_records_from_jsonl(const std::string& text);

}  // namespace hnav
