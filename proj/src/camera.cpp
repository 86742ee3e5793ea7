#include "handpose/camera.hpp"

#include <cmath>

#include "handpose/error.hpp"

namespace handpose {

CameraIntrinsics CameraIntrinsics::kinect(int width, int height) {
  CameraIntrinsics cam;
  const double scale = width / 640.0;
  cam.fx = 525.0 * scale;
  cam.fy = 525.0 * (height / 480.0);
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.width = width;
  cam.height = height;
  return cam;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("camera: focal lengths must be > 0");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw InvalidArgument("camera: principal point must be finite");
  if (!(z_near > 0.0) || !(z_near < z_far)) throw InvalidArgument("camera: require 0 < z_near < z_far");
  if (width < 1 || height < 1) throw InvalidArgument("camera: width and height must be >= 1");
}

KeyValueFile camera_to_keyvalue(const CameraIntrinsics& cam) {
  KeyValueFile kv;
  kv.set("fx", cam.fx);
  kv.set("fy", cam.fy);
  kv.set("cx", cam.cx);
  kv.set("cy", cam.cy);
  kv.set("width", std::to_string(cam.width));
  kv.set("height", std::to_string(cam.height));
  kv.set("z_near", cam.z_near);
  kv.set("z_far", cam.z_far);
  return kv;
}

CameraIntrinsics camera_from_keyvalue(const KeyValueFile& kv, const CameraIntrinsics& fallback) {
  CameraIntrinsics cam;
  cam.fx = kv.get_double("fx", fallback.fx);
  cam.fy = kv.get_double("fy", fallback.fy);
  cam.cx = kv.get_double("cx", fallback.cx);
  cam.cy = kv.get_double("cy", fallback.cy);
  cam.width = static_cast<int>(kv.get_int("width", fallback.width));
  cam.height = static_cast<int>(kv.get_int("height", fallback.height));
  cam.z_near = kv.get_double("z_near", fallback.z_near);
  cam.z_far = kv.get_double("z_far", fallback.z_far);
  try {
    cam.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(kv.source() + ": " + e.what());
  }
  return cam;
}

void save_camera(const std::filesystem::path& path, const CameraIntrinsics& cam) {
  camera_to_keyvalue(cam).save(path);
}

CameraIntrinsics load_camera(const std::filesystem::path& path) {
  const KeyValueFile kv = KeyValueFile::load(path);
  for (const char* key : {"fx", "fy", "cx", "cy", "width", "height", "z_near", "z_far"}) {
    if (!kv.contains(key)) throw IoError(path.string() + ": missing field '" + key + "'");
  }
  return camera_from_keyvalue(kv, CameraIntrinsics{});
}

}  // namespace handpose
