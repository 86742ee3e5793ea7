#pragma once

// 26-parameter hand pose, its legal ranges and the forward kinematics that
// turns a pose into placed analytic primitives.
//
// Conventions (camera frame, right-handed, +z into the scene, millimeters):
//  * Wrist orientation is applied intrinsically in x, y, z order, i.e. the
//    palm-to-camera rotation is Rx(theta_x) * Ry(theta_y) * Rz(theta_z).
//  * In the palm frame the fingers point along -y, the palm normal is z and
//    the palm side faces -z. Positive flexion curls a finger toward -z.
//  * Positive abduction turns a finger toward the little-finger side (+x).
//  * The thumb sits on the -x side; its base frame is pre-rotated 90 deg about
//    the finger axis so that its flexion sweeps across the palm.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "handpose/geometry.hpp"
#include "handpose/rng.hpp"

namespace handpose {

inline constexpr std::size_t kPoseDims = 26;
inline constexpr std::size_t kWristDims = 6;
inline constexpr std::size_t kFingerCount = 5;
inline constexpr std::size_t kFingerDims = 4;

enum class Finger : std::size_t { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Little = 4 };

inline constexpr std::array<const char*, kFingerCount> kFingerNames = {"thumb", "index", "middle",
                                                                       "ring", "little"};

/// Flattened pose: [x, y, z (m), rot_x, rot_y, rot_z (deg), then for thumb..little
/// (mp_flexion, mp_abduction, pip, dip) in degrees].
using PoseVector = std::array<double, kPoseDims>;

struct FingerPose {
  double mp_flexion = 0.0;    // degrees
  double mp_abduction = 0.0;  // degrees
  double pip = 0.0;           // degrees
  double dip = 0.0;           // degrees

  bool operator==(const FingerPose&) const = default;
};

struct WristPose {
  double x = 0.0;  // meters
  double y = 0.0;
  double z = 0.0;
  double rot_x = 0.0;  // degrees
  double rot_y = 0.0;
  double rot_z = 0.0;

  bool operator==(const WristPose&) const = default;
};

struct HandPose {
  WristPose wrist;
  std::array<FingerPose, kFingerCount> fingers{};

  FingerPose& finger(Finger f) { return fingers[static_cast<std::size_t>(f)]; }
  const FingerPose& finger(Finger f) const { return fingers[static_cast<std::size_t>(f)]; }

  PoseVector to_vector() const;
  static HandPose from_vector(const PoseVector& v);

  bool operator==(const HandPose&) const = default;
};

/// Index of a finger parameter in the flattened vector. `joint` is 0..3 in
/// (mp_flexion, mp_abduction, pip, dip) order.
constexpr std::size_t finger_param_index(Finger f, std::size_t joint) {
  return kWristDims + static_cast<std::size_t>(f) * kFingerDims + joint;
}

struct PoseBounds {
  PoseVector lower{};
  PoseVector upper{};

  /// lower[i] < upper[i] for every coordinate. Degenerate boxes (lower == upper)
  /// are accepted by the sampling and clamping code but are not "valid".
  bool valid() const;
};

/// Joint and wrist limits of the reference hand model.
PoseBounds default_bounds();

/// Coordinate-wise clamp into [lower, upper]. Idempotent.
HandPose clamp_pose(const HandPose& h, const PoseBounds& b);

bool within_bounds(const HandPose& h, const PoseBounds& b);

/// Each coordinate drawn independently and uniformly in [lower, upper].
HandPose random_pose(Rng& rng, const PoseBounds& b);

struct PalmDimensions {
  double half_width = 45.0;      // mm, along palm x
  double half_thickness = 15.0;  // mm, along palm z
  double length = 100.0;         // mm, wrist to knuckle line
  double cap_length = 12.0;      // mm, semi-axis of the end-cap ellipsoids along the palm
};

struct FingerDimensions {
  Vec3 base_offset{0.0, 0.0, 0.0};           // mm, MP joint in the palm frame
  double splay = 0.0;                         // degrees, rest direction about the palm normal
  std::array<double, 3> segment_lengths{};   // mm, proximal to distal
  std::array<double, 4> radii{};             // mm, MP, PIP, DIP, tip sphere radii
};

struct HandDimensions {
  PalmDimensions palm;
  std::array<FingerDimensions, kFingerCount> fingers{};
  // Semi-axes of the thumb's proximal ellipsoid along the thumb frame's x,
  // segment and z directions.
  Vec3 thumb_ellipsoid{10.0, 24.0, 13.0};

  static HandDimensions defaults();

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  /// Angular gap in degrees between two finger base frames at zero abduction.
  double rest_separation(Finger left, Finger right) const;

  const FingerDimensions& finger(Finger f) const { return fingers[static_cast<std::size_t>(f)]; }
};

/// Dimension file: `name = value` lines in millimeters / degrees. Missing keys
/// keep their default.
HandDimensions load_dimensions(const std::filesystem::path& path);
HandDimensions parse_dimensions(std::istream& in, const std::string& source_name);
void write_dimensions(std::ostream& out, const HandDimensions& d);

/// Joint-sphere centers of one finger (MP, PIP, DIP, tip) in camera millimeters.
using FingerJoints = std::array<Vec3, 4>;

struct HandSkeleton {
  Mat3 wrist_rotation = Mat3::Identity();
  Vec3 wrist_position = Vec3::Zero();  // mm
  std::array<FingerJoints, kFingerCount> joints{};
};

HandSkeleton hand_skeleton(const HandPose& h, const HandDimensions& d);

/// Number of primitives emitted by forward_kinematics.
inline constexpr std::size_t kPrimitiveCount = 3 + kFingerCount * 7;

/// Palm cylinder, two palm caps, then per finger: sphere, segment, sphere,
/// segment, sphere, segment, sphere. The thumb's proximal segment is an
/// ellipsoid; every other segment is a truncated cone.
HandGeometry forward_kinematics(const HandPose& h, const HandDimensions& d);

/// Rotation matrix of the wrist orientation angles (degrees).
Mat3 wrist_rotation(double rot_x_deg, double rot_y_deg, double rot_z_deg);

void write_pose(std::ostream& out, const HandPose& h);
void save_pose(const std::filesystem::path& path, const HandPose& h);
HandPose parse_pose(std::istream& in, const std::string& source_name);
HandPose load_pose(const std::filesystem::path& path);

}  // namespace handpose
