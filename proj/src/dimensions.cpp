#include <cmath>
#include <fstream>
#include <string>

#include "handpose/error.hpp"
#include "handpose/hand_model.hpp"
#include "handpose/keyvalue.hpp"

namespace handpose {

HandDimensions HandDimensions::defaults() {
  HandDimensions d;
  // Adult anthropometric averages; palm faces the -z side, fingers point along -y.
  d.fingers[0] = {Vec3(-38.0, -28.0, 0.0), -45.0, {40.0, 32.0, 28.0}, {11.0, 9.5, 8.5, 7.5}};
  d.fingers[1] = {Vec3(-28.0, -100.0, 0.0), -22.5, {45.0, 27.0, 22.0}, {9.0, 8.0, 7.0, 6.0}};
  d.fingers[2] = {Vec3(-9.0, -102.0, 0.0), -7.5, {48.0, 30.0, 24.0}, {9.0, 8.0, 7.0, 6.0}};
  d.fingers[3] = {Vec3(10.0, -100.0, 0.0), 7.5, {45.0, 28.0, 23.0}, {8.5, 7.5, 6.5, 5.5}};
  d.fingers[4] = {Vec3(28.0, -95.0, 0.0), 22.5, {36.0, 21.0, 20.0}, {7.5, 6.5, 6.0, 5.5}};
  return d;
}

void HandDimensions::validate() const {
  const auto require_positive = [](double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("hand dimension '" + name + "' must be > 0");
  };
  require_positive(palm.half_width, "palm.half_width");
  require_positive(palm.half_thickness, "palm.half_thickness");
  require_positive(palm.length, "palm.length");
  require_positive(palm.cap_length, "palm.cap_length");
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const std::string name = kFingerNames[f];
    const FingerDimensions& fd = fingers[f];
    for (std::size_t s = 0; s < 3; ++s) require_positive(fd.segment_lengths[s], name + ".length" + std::to_string(s));
    for (std::size_t r = 0; r < 4; ++r) {
      require_positive(fd.radii[r], name + ".radius" + std::to_string(r));
      if (r > 0 && fd.radii[r] > fd.radii[r - 1]) {
        throw InvalidArgument("hand dimension '" + name + ".radius" + std::to_string(r) +
                              "' must not exceed the previous radius");
      }
    }
    if (!fd.base_offset.allFinite() || !std::isfinite(fd.splay)) {
      throw InvalidArgument("hand dimension '" + name + "' base frame is not finite");
    }
  }
  require_positive(thumb_ellipsoid.x(), "thumb.ellipsoid_x");
  require_positive(thumb_ellipsoid.y(), "thumb.ellipsoid_y");
  require_positive(thumb_ellipsoid.z(), "thumb.ellipsoid_z");
}

double HandDimensions::rest_separation(Finger left, Finger right) const {
  return finger(right).splay - finger(left).splay;
}

HandDimensions parse_dimensions(std::istream& in, const std::string& source_name) {
  const KeyValueFile kv = KeyValueFile::parse(in, source_name);
  HandDimensions d = HandDimensions::defaults();
  d.palm.half_width = kv.get_double("palm.half_width", d.palm.half_width);
  d.palm.half_thickness = kv.get_double("palm.half_thickness", d.palm.half_thickness);
  d.palm.length = kv.get_double("palm.length", d.palm.length);
  d.palm.cap_length = kv.get_double("palm.cap_length", d.palm.cap_length);
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const std::string p = std::string(kFingerNames[f]) + ".";
    FingerDimensions& fd = d.fingers[f];
    fd.base_offset.x() = kv.get_double(p + "base_x", fd.base_offset.x());
    fd.base_offset.y() = kv.get_double(p + "base_y", fd.base_offset.y());
    fd.base_offset.z() = kv.get_double(p + "base_z", fd.base_offset.z());
    fd.splay = kv.get_double(p + "splay", fd.splay);
    for (std::size_t s = 0; s < 3; ++s) {
      fd.segment_lengths[s] = kv.get_double(p + "length" + std::to_string(s), fd.segment_lengths[s]);
    }
    for (std::size_t r = 0; r < 4; ++r) fd.radii[r] = kv.get_double(p + "radius" + std::to_string(r), fd.radii[r]);
  }
  d.thumb_ellipsoid.x() = kv.get_double("thumb.ellipsoid_x", d.thumb_ellipsoid.x());
  d.thumb_ellipsoid.y() = kv.get_double("thumb.ellipsoid_y", d.thumb_ellipsoid.y());
  d.thumb_ellipsoid.z() = kv.get_double("thumb.ellipsoid_z", d.thumb_ellipsoid.z());
  try {
    d.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(source_name + ": " + e.what());
  }
  return d;
}

HandDimensions load_dimensions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return parse_dimensions(in, path.string());
}

void write_dimensions(std::ostream& out, const HandDimensions& d) {
  KeyValueFile kv;
  kv.set("palm.half_width", d.palm.half_width);
  kv.set("palm.half_thickness", d.palm.half_thickness);
  kv.set("palm.length", d.palm.length);
  kv.set("palm.cap_length", d.palm.cap_length);
  for (std::size_t f = 0; f < kFingerCount; ++f) {
    const std::string p = std::string(kFingerNames[f]) + ".";
    const FingerDimensions& fd = d.fingers[f];
    kv.set(p + "base_x", fd.base_offset.x());
    kv.set(p + "base_y", fd.base_offset.y());
    kv.set(p + "base_z", fd.base_offset.z());
    kv.set(p + "splay", fd.splay);
    for (std::size_t s = 0; s < 3; ++s) kv.set(p + "length" + std::to_string(s), fd.segment_lengths[s]);
    for (std::size_t r = 0; r < 4; ++r) kv.set(p + "radius" + std::to_string(r), fd.radii[r]);
  }
  kv.set("thumb.ellipsoid_x", d.thumb_ellipsoid.x());
  kv.set("thumb.ellipsoid_y", d.thumb_ellipsoid.y());
  kv.set("thumb.ellipsoid_z", d.thumb_ellipsoid.z());
  kv.write(out);
}

}  // namespace handpose
