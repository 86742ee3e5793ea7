#pragma once

#include <filesystem>

#include "handpose/keyvalue.hpp"

namespace handpose {

/// Pinhole intrinsics. Pixel (u, v) is sampled through its center (u + 0.5, v + 0.5).
struct CameraIntrinsics {
  double fx = 131.25;
  double fy = 131.25;
  double cx = 80.0;
  double cy = 60.0;
  int width = 160;
  int height = 120;
  double z_near = 300.0;  // mm
  double z_far = 2000.0;  // mm

  /// Kinect-class sensor (fx = fy = 525 at 640x480) scaled to the requested resolution.
  static CameraIntrinsics kinect(int width, int height);

  /// Throws InvalidArgument when the intrinsics violate fx, fy > 0, 0 < near < far, size >= 1.
  void validate() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

KeyValueFile camera_to_keyvalue(const CameraIntrinsics& cam);
CameraIntrinsics camera_from_keyvalue(const KeyValueFile& kv, const CameraIntrinsics& fallback);

void save_camera(const std::filesystem::path& path, const CameraIntrinsics& cam);
/// Every field must be present in a camera sidecar.
CameraIntrinsics load_camera(const std::filesystem::path& path);

}  // namespace handpose
