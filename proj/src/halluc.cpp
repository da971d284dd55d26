#include "hnav/halluc.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hnav/errors.hpp"
#include "hnav/io.hpp"

namespace hnav {

namespace {

constexpr double kStraightChordTol = 1e-3;  // c_m-to-chord distance
constexpr double kMinChord = 1e-9;

// Walk the records from index i until `arc` meters of path have accrued.
// Returns the interpolated configuration at exactly that arc length, or
// nullopt when the remaining recorded path is too short. Also appends the
// intermediate record poses to *trail when given.
std::optional<Configuration> walk_arc(const std::vector<RawRecord>& d_raw, size_t i,
                                      double arc, std::vector<Configuration>* trail) {
  double accrued = 0.0;
  for (size_t k = i; k < d_raw.size(); ++k) {
    const Configuration pose{d_raw[k].x, d_raw[k].y, d_raw[k].psi};
    if (trail != nullptr && k > i) trail->push_back(pose);
    const double step = std::abs(d_raw[k].v) * kControlDt;
    if (accrued + step >= arc) {
      const double remaining = arc - accrued;
      const double tau = step > 0.0 ? remaining / step : 0.0;
      return advance_arc(pose, d_raw[k].v, d_raw[k].omega, tau * kControlDt);
    }
    accrued += step;
  }
  return std::nullopt;
}

Vec2 to_robot_frame(const Configuration& frame, Vec2 p) {
  const Vec2 d = p - frame.position();
  const double c = std::cos(frame.psi);
  const double s = std::sin(frame.psi);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Scan empty_scan(const SensorConfig& cfg) {
  Scan scan;
  scan.config = cfg;
  scan.ranges.assign(cfg.beam_count, cfg.max_range);
  return scan;
}

TrainSample make_sample(const PlanWindow& window, Scan scan) {
  TrainSample s;
  s.scan = std::move(scan.ranges);
  const Vec2 rel = to_robot_frame(window.c_c, window.c_g.position());
  s.goal_dx = rel.x;
  s.goal_dy = rel.y;
  s.v_in = window.v_in;
  s.omega_in = window.omega_in;
  s.label_v = window.label.v;
  s.label_omega = window.label.omega;
  return s;
}

}  // namespace

std::vector<PlanWindow> extract_windows(const std::vector<RawRecord>& d_raw,
                                        const HallucinationParams& params) {
  std::vector<PlanWindow> windows;
  for (size_t i = 0; i < d_raw.size(); ++i) {
    PlanWindow w;
    w.c_c = Configuration{d_raw[i].x, d_raw[i].y, d_raw[i].psi};
    w.trajectory.push_back(w.c_c);
    const auto goal = walk_arc(d_raw, i, params.lookahead, &w.trajectory);
    if (!goal) break;  // every later window is shorter still
    const auto mid = walk_arc(d_raw, i, 0.5 * params.lookahead, nullptr);
    w.c_g = *goal;
    w.c_m = *mid;
    w.trajectory.push_back(w.c_g);
    w.label = Command{d_raw[i].v, d_raw[i].omega};
    if (i > 0) {
      w.v_in = d_raw[i - 1].v;
      w.omega_in = d_raw[i - 1].omega;
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

double offset_fn(double v, const HallucinationParams& params) {
  if (v <= params.offset_lo_v) return 0.0;
  if (v >= params.offset_hi_v) return params.offset_max;
  return (v - params.offset_lo_v) / (params.offset_hi_v - params.offset_lo_v) *
         params.offset_max;
}

Scan most_constrained_scan(const PlanWindow& window, const SensorConfig& cfg,
                           const HallucinationParams& params) {
  const Region corridor = swept_corridor(window.trajectory, params.footprint_r);
  Scan scan;
  scan.config = cfg;
  scan.ranges.resize(cfg.beam_count);
  const Vec2 origin = window.c_c.position();
  for (int i = 0; i < cfg.beam_count; ++i) {
    const Ray ray{origin, window.c_c.psi + cfg.beam_rel_angle(i)};
    const auto hits = ray_region_distances(ray, corridor, cfg.max_range);
    scan.ranges[i] = hits.last_exit ? std::min(*hits.last_exit, cfg.max_range)
                                    : 0.0;  // origin outside the corridor
  }
  return scan;
}

Region build_minimal_region(const PlanWindow& window) {
  const Vec2 a = window.c_c.position();
  const Vec2 b = window.c_g.position();
  const double chord_len = dist(a, b);
  if (chord_len < kMinChord) {
    throw DegenerateChord("build_minimal_region: window chord collapsed");
  }
  const Vec2 chord_dir = (b - a) * (1.0 / chord_len);
  const double lateral = chord_dir.cross(window.c_m.position() - a);
  Region region;
  if (std::abs(lateral) <= kStraightChordTol) return region;  // straight plan

  const Vec2 mirrored = reflect_across_chord(window.c_c, window.c_g, window.c_m);
  const auto circle = circle_through_three_points(a, mirrored, b);
  if (!circle) return region;  // numerically straight
  CircularSegment seg;
  seg.center = circle->center;
  seg.radius = circle->radius;
  seg.chord_a = a;
  seg.chord_b = b;
  seg.side = (b - a).cross(mirrored - a) >= 0.0 ? 1 : -1;
  region.add(seg);
  return region;
}

BeamBounds beam_bounds(const PlanWindow& window, const Region& region,
                       const SensorConfig& cfg, const HallucinationParams& params) {
  const Region corridor = swept_corridor(window.trajectory, params.footprint_r);
  // Cap the offset below max_range - footprint_r: at full speed an uncapped
  // offset saturates every beam interval to a point at max_range, which
  // makes sampled scans indistinguishable from the dedicated empty-world
  // variant.
  const double offset = std::min(
      offset_fn(window.v_in, params),
      std::max(0.0, cfg.max_range - params.footprint_r - 1e-3));
  BeamBounds bounds;
  bounds.min.resize(cfg.beam_count);
  bounds.max.resize(cfg.beam_count);
  const Vec2 origin = window.c_c.position();
  for (int i = 0; i < cfg.beam_count; ++i) {
    const Ray ray{origin, window.c_c.psi + cfg.beam_rel_angle(i)};
    const auto corridor_hits = ray_region_distances(ray, corridor, cfg.max_range);
    const double raw_min =
        corridor_hits.last_exit ? std::min(*corridor_hits.last_exit, cfg.max_range) : 0.0;
    double max_i = cfg.max_range;
    if (!region.empty()) {
      // First region surface at or beyond the corridor wall: hallucinated
      // obstacles may not start before the swept path ends, so region
      // stretches the plan already covers are skipped and the corridor
      // wall floors the bound.
      for (const Span& span : ray_region_spans(ray, region, cfg.max_range)) {
        if (span.t1 > raw_min + 1e-12) {
          max_i = std::max(span.t0, raw_min);
          break;
        }
      }
    }
    bounds.min[i] = std::min(raw_min + offset, max_i);
    bounds.max[i] = max_i;
  }
  return bounds;
}

Scan sample_scan(Rng& rng, const BeamBounds& bounds, double alpha,
                 const SensorConfig& cfg) {
  const size_t n = bounds.min.size();
  if (bounds.max.size() != n || n != static_cast<size_t>(cfg.beam_count)) {
    throw DimensionMismatch("sample_scan: bounds/beam_count mismatch");
  }
  Scan scan;
  scan.config = cfg;
  scan.ranges.resize(n);
  double prev = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double lo = bounds.min[i];
    const double hi = bounds.max[i];
    if (lo > hi) throw BoundsViolation("sample_scan: min > max at beam " + std::to_string(i));
    const double u = rng.uniform(lo, hi);
    double s = i == 0 ? u : alpha * prev + (1.0 - alpha) * u;
    s = std::min(std::max(s, lo), hi);
    scan.ranges[i] = s;
    prev = s;
  }
  return scan;
}

std::vector<TrainSample> synthesize_dataset(const std::vector<RawRecord>& d_raw,
                                            const SensorConfig& cfg,
                                            const HallucinationParams& params,
                                            uint64_t seed) {
  if (d_raw.empty()) throw ConfigError("synthesize_dataset: empty raw dataset");
  const auto windows = extract_windows(d_raw, params);
  std::vector<TrainSample> out;
  out.reserve(windows.size() * (params.sampling_count + 2));
  for (size_t w = 0; w < windows.size(); ++w) {
    const PlanWindow& window = windows[w];
    Rng rng(mix_seed(seed, w));
    const Region region = build_minimal_region(window);
    const BeamBounds bounds = beam_bounds(window, region, cfg, params);
    const bool add_empty = window.v_in > params.v_empty_threshold;
    const bool add_constrained = window.v_in < params.v_constrained_threshold;
    int minimal_count = params.sampling_count + 2;
    if (add_empty) --minimal_count;
    if (add_constrained) --minimal_count;
    for (int k = 0; k < minimal_count; ++k) {
      out.push_back(make_sample(window, sample_scan(rng, bounds, params.alpha, cfg)));
    }
    if (add_empty) out.push_back(make_sample(window, empty_scan(cfg)));
    if (add_constrained) {
      out.push_back(make_sample(window, most_constrained_scan(window, cfg, params)));
    }
  }
  return out;
}

std::vector<TrainSample> synthesize_most_constrained(
    const std::vector<RawRecord>& d_raw, const SensorConfig& cfg,
    const HallucinationParams& params) {
  if (d_raw.empty()) throw ConfigError("synthesize_most_constrained: empty raw dataset");
  const auto windows = extract_windows(d_raw, params);
  std::vector<TrainSample> out;
  out.reserve(windows.size());
  for (const auto& window : windows) {
    out.push_back(make_sample(window, most_constrained_scan(window, cfg, params)));
  }
  return out;
}

std::string train_samples_to_jsonl(const std::vector<TrainSample>& samples,
                                   const HallucinationParams& params,
                                   const std::string& source_digest,
                                   const std::string& mode) {
  nlohmann::json header;
  header["schema"] = "hnav.train.v1";
  header["mode"] = mode;
  header["source_digest"] = source_digest;
  header["params"] = {{"sampling_count", params.sampling_count},
                      {"alpha", params.alpha},
                      {"offset_lo_v", params.offset_lo_v},
                      {"offset_hi_v", params.offset_hi_v},
                      {"offset_max", params.offset_max},
                      {"v_empty_threshold", params.v_empty_threshold},
                      {"v_constrained_threshold", params.v_constrained_threshold},
                      {"footprint_r", params.footprint_r},
                      {"lookahead", params.lookahead}};
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& s : samples) {
    out += "{\"scan\":[";
    for (size_t i = 0; i < s.scan.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += format_double(s.scan[i], 6);
    }
    out += "],\"goal\":[" + format_double(s.goal_dx, 6) + "," + format_double(s.goal_dy, 6);
    out += "],\"vel\":[" + format_double(s.v_in, 6) + "," + format_double(s.omega_in, 6);
    out += "],\"label\":[" + format_double(s.label_v, 6) + "," +
           format_double(s.label_omega, 6) + "]}\n";
  }
  return out;
}

std::vector<TrainSample> train_samples_from_jsonl(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ConfigError("train dataset: empty file");
  const auto header = nlohmann::json::parse(lines[0]);
  if (!header.contains("schema") || header.at("schema") != "hnav.train.v1") {
    throw ConfigError("train dataset: bad or missing schema tag");
  }
  std::vector<TrainSample> samples;
  samples.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto j = nlohmann::json::parse(lines[i]);
    TrainSample s;
    s.scan = j.at("scan").get<std::vector<double>>();
    s.goal_dx = j.at("goal").at(0).get<double>();
    s.goal_dy = j.at("goal").at(1).get<double>();
    s.v_in = j.at("vel").at(0).get<double>();
    s.omega_in = j.at("vel").at(1).get<double>();
    s.label_v = j.at("label").at(0).get<double>();
    s.label_omega = j.at("label").at(1).get<double>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace hnav
