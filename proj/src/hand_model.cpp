#include "handpose/hand_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "handpose/error.hpp"
#include "handpose/keyvalue.hpp"

namespace handpose {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Mat3 rot_x(double deg) { return Eigen::AngleAxisd(deg * kDegToRad, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double deg) { return Eigen::AngleAxisd(deg * kDegToRad, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double deg) { return Eigen::AngleAxisd(deg * kDegToRad, Vec3::UnitZ()).toRotationMatrix(); }

const Vec3 kFingerDirection{0.0, -1.0, 0.0};

// Finger chain in the (unrotated, untranslated) palm frame.
struct FingerChain {
  std::array<Vec3, 4> joints;  // palm-frame millimeters
  Mat3 proximal_frame;         // frame of the proximal segment
};

FingerChain finger_chain(const FingerPose& q, const FingerDimensions& fd, bool is_thumb) {
  Mat3 frame = rot_z(fd.splay);
  if (is_thumb) frame = frame * rot_y(-90.0);
  frame = frame * rot_z(q.mp_abduction) * rot_x(q.mp_flexion);

  FingerChain c;
  c.proximal_frame = frame;
  c.joints[0] = fd.base_offset;
  c.joints[1] = c.joints[0] + frame * (kFingerDirection * fd.segment_lengths[0]);
  frame = frame * rot_x(q.pip);
  c.joints[2] = c.joints[1] + frame * (kFingerDirection * fd.segment_lengths[1]);
  frame = frame * rot_x(q.dip);
  c.joints[3] = c.joints[2] + frame * (kFingerDirection * fd.segment_lengths[2]);
  return c;
}

}  // namespace

PoseVector HandPose::to_vector() const {
  PoseVector v{};
  v[0] = wrist.x;
  v[1] = wrist.y;
  v[2] = wrist.z;
  v[3] = wrist.rot_x;
  v[4] = wrist.rot_y;
  v[5] = wrist.rot_z;
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const std::size_t base = kWristDims + f * kFingerDims;
    v[base + 0] = fingers[f].mp_flexion;
    v[base + 1] = fingers[f].mp_abduction;
    v[base + 2] = fingers[f].pip;
    v[base + 3] = fingers[f].dip;
  }
  return v;
}

HandPose HandPose::from_vector(const PoseVector& v) {
  HandPose h;
  h.wrist = {v[0], v[1], v[2], v[3], v[4], v[5]};
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const std::size_t base = kWristDims + f * kFingerDims;
    h.fingers[f] = {v[base + 0], v[base + 1], v[base + 2], v[base + 3]};
  }
  return h;
}

bool PoseBounds::valid() const {
  for (std::size_t i = 0; i < kPoseDims; ++i) {
    if (!(lower[i] < upper[i])) return false;
  }
  return true;
}

PoseBounds default_bounds() {
  PoseBounds b;
  // Wrist: position box in meters, orientation in degrees.
  const std::array<std::pair<double, double>, kWristDims> wrist = {{
      {-0.9, 0.9}, {-0.68, 0.68}, {0.5, 1.5}, {-30.0, 120.0}, {-70.0, 75.0}, {-35.0, 20.0}}};
  // Per finger: mp_flexion, mp_abduction, pip, dip.
  const std::array<std::array<std::pair<double, double>, kFingerDims>, kFingerCount> fingers = {{
      {{{0.0, 90.0}, {-15.0, 60.0}, {0.0, 50.0}, {-15.0, 70.0}}},   // thumb
      {{{0.0, 90.0}, {-15.0, 15.0}, {0.0, 100.0}, {0.0, 60.0}}},    // index
      {{{0.0, 90.0}, {-10.0, 10.0}, {0.0, 100.0}, {0.0, 60.0}}},    // middle
      {{{0.0, 90.0}, {-30.0, 0.0}, {0.0, 100.0}, {0.0, 60.0}}},     // ring
      {{{0.0, 90.0}, {-45.0, 0.0}, {0.0, 100.0}, {0.0, 60.0}}},     // little
  }};
  for (std::size_t i = 0; i < kWristDims; ++i) {
    b.lower[i] = wrist[i].first;
    b.upper[i] = wrist[i].second;
  }
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    for (std::size_t j = 0; j < kFingerDims; ++j) {
      b.lower[kWristDims + f * kFingerDims + j] = fingers[f][j].first;
      b.upper[kWristDims + f * kFingerDims + j] = fingers[f][j].second;
    }
  }
  return b;
}

HandPose clamp_pose(const HandPose& h, const PoseBounds& b) {
  PoseVector v = h.to_vector();
  for (std::size_t i = 0; i < kPoseDims; ++i) v[i] = std::clamp(v[i], b.lower[i], b.upper[i]);
  return HandPose::from_vector(v);
}

bool within_bounds(const HandPose& h, const PoseBounds& b) {
  const PoseVector v = h.to_vector();
  for (std::size_t i = 0; i < kPoseDims; ++i) {
    if (!(v[i] >= b.lower[i] && v[i] <= b.upper[i])) return false;
  }
  return true;
}

HandPose random_pose(Rng& rng, const PoseBounds& b) {
  PoseVector v{};
  for (std::size_t i = 0; i < kPoseDims; ++i) v[i] = uniform_in(rng, b.lower[i], b.upper[i]);
  return HandPose::from_vector(v);
}

Mat3 wrist_rotation(double rot_x_deg, double rot_y_deg, double rot_z_deg) {
  return rot_x(rot_x_deg) * rot_y(rot_y_deg) * rot_z(rot_z_deg);
}

HandSkeleton hand_skeleton(const HandPose& h, const HandDimensions& d) {
  HandSkeleton s;
  s.wrist_rotation = wrist_rotation(h.wrist.rot_x, h.wrist.rot_y, h.wrist.rot_z);
  s.wrist_position = Vec3(h.wrist.x, h.wrist.y, h.wrist.z) * 1000.0;
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const FingerChain c = finger_chain(h.fingers[f], d.fingers[f], f == 0);
    for (std::size_t j = 0; j < 4; ++j) {
      // Rotate first, translate last.
      s.joints[f][j] = Vec3(s.wrist_rotation * c.joints[j]) + s.wrist_position;
    }
  }
  return s;
}

HandGeometry forward_kinematics(const HandPose& h, const HandDimensions& d) {
  const Mat3 R = wrist_rotation(h.wrist.rot_x, h.wrist.rot_y, h.wrist.rot_z);
  const Vec3 t = Vec3(h.wrist.x, h.wrist.y, h.wrist.z) * 1000.0;
  const auto place = [&](const Vec3& p) -> Vec3 { return Vec3(R * p) + t; };

  HandGeometry g;
  g.primitives.reserve(kPrimitiveCount);

  const PalmDimensions& palm = d.palm;
  const Vec3 knuckle_center = kFingerDirection * palm.length;
  g.primitives.emplace_back(EllipticCylinder{place(Vec3::Zero()), R * kFingerDirection, R * Vec3::UnitX(),
                                             Vec2(palm.half_width, palm.half_thickness), palm.length});
  const Vec3 cap_axes(palm.half_width, palm.cap_length, palm.half_thickness);
  g.primitives.emplace_back(Ellipsoid{place(Vec3::Zero()), cap_axes, R});
  g.primitives.emplace_back(Ellipsoid{place(knuckle_center), cap_axes, R});

  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const FingerDimensions& fd = d.fingers[f];
    const bool is_thumb = f == 0;
    const FingerChain c = finger_chain(h.fingers[f], fd, is_thumb);
    std::array<Vec3, 4> p;
    for (std::size_t j = 0; j < 4; ++j) p[j] = place(c.joints[j]);

    for (std::size_t seg = 0; seg < 3; ++seg) {
      g.primitives.emplace_back(Sphere{p[seg], fd.radii[seg]});
      if (is_thumb && seg == 0) {
        const Vec3 mid = place(0.5 * (c.joints[0] + c.joints[1]));
        g.primitives.emplace_back(Ellipsoid{mid, d.thumb_ellipsoid, R * c.proximal_frame});
      } else {
        g.primitives.emplace_back(TruncatedCone{p[seg], p[seg + 1], fd.radii[seg], fd.radii[seg + 1]});
      }
    }
    g.primitives.emplace_back(Sphere{p[3], fd.radii[3]});
  }
  return g;
}

Vec3 primitive_anchor(const Primitive& p) {
  return std::visit(
      [](const auto& prim) -> Vec3 {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Ellipsoid>) {
          return prim.center;
        } else {
          return prim.base_center;
        }
      },
      p);
}

HandGeometry translated(const HandGeometry& g, const Vec3& t) {
  HandGeometry out = g;
  for (Primitive& p : out.primitives) {
    std::visit(
        [&](auto& prim) {
          using T = std::decay_t<decltype(prim)>;
          if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Ellipsoid>) {
            prim.center += t;
          } else if constexpr (std::is_same_v<T, TruncatedCone>) {
            prim.base_center += t;
            prim.tip_center += t;
          } else {
            prim.base_center += t;
          }
        },
        p);
  }
  return out;
}

void write_pose(std::ostream& out, const HandPose& h) {
  const PoseVector v = h.to_vector();
  out << "# x y z (m) rot_x rot_y rot_z (deg)\n";
  for (std::size_t i = 0; i < kWristDims; ++i) out << (i ? " " : "") << format_double(v[i]);
  out << '\n';
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    out << "# " << kFingerNames[f] << ": mp_flexion mp_abduction pip dip (deg)\n";
    for (std::size_t j = 0; j < kFingerDims; ++j) {
      out << (j ? " " : "") << format_double(v[kWristDims + f * kFingerDims + j]);
    }
    out << '\n';
  }
}

void save_pose(const std::filesystem::path& path, const HandPose& h) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  write_pose(out, h);
  if (!out) throw IoError(path.string() + ": write failed");
}

HandPose parse_pose(std::istream& in, const std::string& source_name) {
  PoseVector v{};
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      if (count == kPoseDims) throw IoError(source_name + ": more than 26 pose values");
      double value = 0.0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw IoError(source_name + ": pose value " + std::to_string(count) + " is not a finite number: '" +
                      token + "'");
      }
      v[count++] = value;
    }
  }
  if (count != kPoseDims) {
    throw IoError(source_name + ": expected 26 pose values, found " + std::to_string(count));
  }
  return HandPose::from_vector(v);
}

HandPose load_pose(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return parse_pose(in, path.string());
}

}  // namespace handpose
