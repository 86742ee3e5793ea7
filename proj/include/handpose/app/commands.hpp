#pragma once
// The CLI subcommands as library calls. Each writes its artifacts plus the
// effective config into cfg.output_dir and logs human-readable lines to `log`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "handpose/app/run_config.hpp"
#include "handpose/cost.hpp"
#include "handpose/observation.hpp"
#include "handpose/pso.hpp"

namespace handpose::app {

/// Stem of the observation written by cmd_synth inside the output directory.
inline constexpr const char* kObservationStem = "observation";

struct SynthResult {
  ObservationPaths paths;
  HandPose pose;         // after clamping
  bool clamped = false;  // the input pose was outside the bounds
};

/// Renders the pose file's pose (clamped into bounds with a warning) and
/// writes `observation.{mask.pgm,depth.pgm,cam}`. Noise from cfg.noise is
/// drawn from a generator seeded with cfg.seed.
SynthResult cmd_synth(const std::filesystem::path& pose_file, const RunConfig& cfg, std::ostream& log);

struct RecognizeResult {
  HandPose pose;
  PsoResult pso;
};

/// Default search box as optimizer bounds.
BoxBounds recognition_bounds();

/// Warm start of half width cfg.warm_radius_* around `center`.
WarmStart warm_start_around(const HandPose& center, const RunConfig& cfg);

/// Runs the swarm on an in-memory observation without touching the disk.
RecognizeResult recognize(const Observation& obs, const RunConfig& cfg, const std::optional<HandPose>& warm);

/// Writes `pose.txt`, `trace.csv` (generation,best_cost) and the overlay
/// images `overlay_observed.pgm`, `overlay_recognized.pgm`,
/// `overlay_side_by_side.pgm`, `overlay_difference.pgm`.
RecognizeResult cmd_recognize(const ObservationPaths& obs, const RunConfig& cfg,
                              const std::optional<std::filesystem::path>& warm_pose_file, std::ostream& log);

/// Prints `depth_term`, `area_term`, `penalty_term`, `kc` and `total` as
/// `name = value` lines.
CostBreakdown cmd_eval(const std::filesystem::path& pose_file, const ObservationPaths& obs, const RunConfig& cfg,
                       std::ostream& out);

struct BenchRow {
  unsigned workers = 0;
  double render_ms = 0.0;     // rendering and observation construction, per frame
  double objective_ms = 0.0;  // cost evaluation, per frame
  double total_ms = 0.0;      // wall clock per frame
  double final_cost = 0.0;    // bitwise equal across rows
};

/// Times full recognitions of synthetic frames for every count in
/// cfg.bench_workers. Writes `bench.csv`.
std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out);

struct TrackFrame {
  long long number = 0;
  std::string stem;
  RecognizeResult result;
};

/// Recognizes every `<name><digits>.depth.pgm` observation in `dir` in
/// numeric order. Frame 1 starts cold; each later frame starts around the
/// previous solution. Writes `<stem>.pose` per frame and `track.csv`.
std::vector<TrackFrame> cmd_track(const std::filesystem::path& dir, const RunConfig& cfg, std::ostream& log);

/// Error metrics against a known pose.
double wrist_position_error(const HandPose& a, const HandPose& b);     // meters
double wrist_orientation_error(const HandPose& a, const HandPose& b);  // degrees, geodesic

/// Seeded suite of reference poses: in bounds, kc = 0, the whole silhouette
/// inside the frame and at least `min_pixels` hand pixels.
std::vector<HandPose> reference_suite(std::size_t count, std::uint64_t seed, const HandDimensions& d,
                                      const CameraIntrinsics& cam, int min_pixels = 30);

/// Trace as CSV text; one row per evaluated generation.
std::string trace_csv(const std::vector<double>& trace);

}  // namespace handpose::app
