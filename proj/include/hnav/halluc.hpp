#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hnav/explore.hpp"
#include "hnav/geometry.hpp"
#include "hnav/rng.hpp"
#include "hnav/sim.hpp"

namespace hnav {

/// One lookahead slice of the raw trajectory: the plan window whose
/// surroundings get hallucinated.
struct PlanWindow {
  Configuration c_c;  // window start (sensor pose)
  Configuration c_m;  // arc-length midpoint
  Configuration c_g;  // window end, the local goal
  std::vector<Configuration> trajectory;  // dense samples from c_c to c_g
  Command label;      // action executed at c_c (the record's own velocity)
  double v_in = 0.0;  // state velocity arriving at c_c
  double omega_in = 0.0;
};

struct HallucinationParams {
  int sampling_count = 10;
  double alpha = 0.48;            // neighboring-beam smoothing blend
  double offset_lo_v = 0.3;       // m/s, offset() ramp start
  double offset_hi_v = 1.0;       // m/s, offset() ramp end
  double offset_max = 1.0;        // m at the ramp end
  double v_empty_threshold = 0.8;      // above: add one empty-world variant
  double v_constrained_threshold = 0.3;  // below: add one most-constrained variant
  double footprint_r = kFootprintRadius;
  double lookahead = 1.0;  // m of arc length per window
};

struct TrainSample {
  std::vector<double> scan;  // hallucinated ranges
  double goal_dx = 0.0;      // c_g in c_c's frame
  double goal_dy = 0.0;
  double v_in = 0.0;
  double omega_in = 0.0;
  double label_v = 0.0;
  double label_omega = 0.0;
};

struct BeamBounds {
  std::vector<double> min;
  std::vector<double> max;
};

/// Slice d_raw into plan windows of `lookahead` arc length. Windows whose
/// remaining recorded path is shorter than the lookahead are dropped.
std::vector<PlanWindow> extract_windows(const std::vector<RawRecord>& d_raw,
                                        const HallucinationParams& params);

/// Piecewise-linear speed-to-clearance map: 0 below offset_lo_v, offset_max
/// above offset_hi_v, linear in between.
double offset_fn(double v, const HallucinationParams& params);

/// Projection of the most constrained obstacle set: every beam runs to the
/// far boundary of the swept corridor (or the sensor limit).
Scan most_constrained_scan(const PlanWindow& window, const SensorConfig& cfg,
                           const HallucinationParams& params);

/// The minimal obstacle approximation: the circular segment bounded by the
/// chord c_c-c_g and the arc through c_c, c_m', c_g, where c_m' mirrors c_m
/// across the chord. Straight plans (c_m within 1e-3 m of the chord) give
/// the empty region.
Region build_minimal_region(const PlanWindow& window);

/// Per-beam sampling interval from pose c_c: max from the minimal region
/// (clamped so hallucinated obstacles never start inside the swept
/// corridor), min from the corridor wall plus the speed-dependent offset.
BeamBounds beam_bounds(const PlanWindow& window, const Region& region,
                       const SensorConfig& cfg, const HallucinationParams& params);

/// Draw ranges within [min, max], blending each beam with its predecessor
/// by alpha for continuity. Throws BoundsViolation if any min > max.
Scan sample_scan(Rng& rng, const BeamBounds& bounds, double alpha,
                 const SensorConfig& cfg);

/// Full synthesis: every window yields sampling_count + 2 samples. The two
/// extras are an empty-world scan when v > v_empty_threshold, a
/// most-constrained scan when v < v_constrained_threshold, and additional
/// minimal-region samples otherwise. Window RNG streams derive from
/// (seed, window index).
std::vector<TrainSample> synthesize_dataset(const std::vector<RawRecord>& d_raw,
                                            const SensorConfig& cfg,
                                            const HallucinationParams& params,
                                            uint64_t seed);

/// Most-constrained-only synthesis: one deterministic sample per window.
std::vector<TrainSample> synthesize_most_constrained(
    const std::vector<RawRecord>& d_raw, const SensorConfig& cfg,
    const HallucinationParams& params);

std::string train_samples_to_jsonl(const std::vector<TrainSample>& samples,
                                   const HallucinationParams& params,
                                   const std::string& source_digest,
                                   const std::string& mode);
std::vector<TrainSample> train_samples_from_jsonl(const std::string& text);

}  // namespace hnav
