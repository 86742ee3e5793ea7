#pragma once

#include <filesystem>
#include <string>

#include "handpose/camera.hpp"
#include "handpose/hand_model.hpp"
#include "handpose/image.hpp"
#include "handpose/rng.hpp"

namespace handpose {

/// Observed silhouette and depth of the hand under a known camera. Depth is
/// whole millimeters; 0 marks missing depth, which is legal inside the mask.
struct Observation {
  SilhouetteMask mask;
  DepthImage depth;
  CameraIntrinsics cam;

  bool operator==(const Observation&) const = default;
};

struct NoiseSpec {
  double depth_sigma = 0.0;     // mm, Gaussian added to valid depth pixels
  double dropout_prob = 0.0;    // valid depth pixel set to 0, mask untouched
  double mask_flip_prob = 0.0;  // mask pixel inverted

  void validate() const;
  bool is_identity() const { return depth_sigma == 0.0 && dropout_prob == 0.0 && mask_flip_prob == 0.0; }
};

/// Renders the reference pose, quantizes depth to millimeters and derives the mask.
Observation synthesize_observation(const HandPose& reference, const HandDimensions& d, const CameraIntrinsics& cam);

/// Deterministic for a given generator state. Noisy depths are rounded to
/// millimeters and kept >= 1 so that noise never fakes a dropout.
Observation apply_noise(const Observation& o, const NoiseSpec& noise, Rng& rng);

/// Paths of the three files that make up a stored observation:
/// `<stem>.mask.pgm`, `<stem>.depth.pgm`, `<stem>.cam`.
struct ObservationPaths {
  std::filesystem::path mask;
  std::filesystem::path depth;
  std::filesystem::path camera;

  static ObservationPaths from_stem(const std::filesystem::path& stem);
};

/// Throws IoError on malformed files and DimensionMismatch when mask and depth
/// (or the camera) disagree on resolution.
Observation load_observation(const std::filesystem::path& mask_path, const std::filesystem::path& depth_path,
                             const CameraIntrinsics& cam);
Observation load_observation(const ObservationPaths& paths);

void save_observation(const Observation& o, const ObservationPaths& paths);

}  // namespace handpose
