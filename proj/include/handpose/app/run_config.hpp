#pragma once
// Everything one CLI run depends on. A run copies its effective config into
// its output directory, and loading that copy reproduces the run.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "handpose/camera.hpp"
#include "handpose/cost.hpp"
#include "handpose/hand_model.hpp"
#include "handpose/keyvalue.hpp"
#include "handpose/observation.hpp"
#include "handpose/pso.hpp"

namespace handpose::app {

struct RunConfig {
  CameraIntrinsics camera = CameraIntrinsics::kinect(160, 120);
  std::string dimensions_path;  // empty: built-in dimensions
  CostParams cost;
  PsoParams pso;
  unsigned workers = 0;  // 0: HANDPOSE_WORKERS or hardware concurrency
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  NoiseSpec noise;
  // Warm-start half widths: meters for x/y/z, degrees for every angle.
  double warm_radius_position = 0.05;
  double warm_radius_angle = 20.0;
  // Benchmark knobs.
  std::vector<unsigned> bench_workers{1, 4};
  int bench_frames = 2;

  /// Throws InvalidArgument on any out-of-range setting.
  void validate() const;
  HandDimensions dimensions() const;
  unsigned effective_workers() const;
  /// PSO parameters with the run seed applied.
  PsoParams pso_params() const;
};

/// Missing keys keep the values of `base`. Unknown keys are rejected so that
/// typos do not silently fall back to defaults.
RunConfig run_config_from_keyvalue(const KeyValueFile& kv, const RunConfig& base = {});
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base = {});
KeyValueFile run_config_to_keyvalue(const RunConfig& cfg);
/// Writes `config.txt` into the output directory (created if needed).
void save_effective_config(const RunConfig& cfg);

/// "160x120" -> (160, 120). Throws InvalidArgument.
std::pair<int, int> parse_resolution(const std::string& text);

}  // namespace handpose::app
