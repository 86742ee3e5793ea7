#include "handpose/observation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "handpose/error.hpp"
#include "handpose/pgm.hpp"
#include "handpose/render.hpp"

namespace handpose {

void NoiseSpec::validate() const {
  if (!(depth_sigma >= 0.0)) throw InvalidArgument("noise: depth_sigma must be >= 0");
  for (const double p : {dropout_prob, mask_flip_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("noise: probabilities must lie in [0, 1]");
  }
}

Observation synthesize_observation(const HandPose& reference, const HandDimensions& d, const CameraIntrinsics& cam) {
  Observation o;
  o.cam = cam;
  o.depth = render_depth(forward_kinematics(reference, d), cam);
  quantize_depth(o.depth);
  o.mask = silhouette_of(o.depth);
  return o;
}

Observation apply_noise(const Observation& o, const NoiseSpec& noise, Rng& rng) {
  noise.validate();
  Observation out = o;
  if (noise.is_identity()) return out;

  std::normal_distribution<double> gauss(0.0, noise.depth_sigma);
  for (double& z : out.depth.data) {
    if (z == 0.0) continue;
    if (noise.dropout_prob > 0.0 && uniform01(rng) < noise.dropout_prob) {
      z = 0.0;
      continue;
    }
    if (noise.depth_sigma > 0.0) z = std::clamp(std::round(z + gauss(rng)), 1.0, 65535.0);
  }
  if (noise.mask_flip_prob > 0.0) {
    for (auto& m : out.mask.data) {
      if (uniform01(rng) < noise.mask_flip_prob) m = m ? 0 : 1;
    }
  }
  return out;
}

ObservationPaths ObservationPaths::from_stem(const std::filesystem::path& stem) {
  const std::string s = stem.string();
  return {s + ".mask.pgm", s + ".depth.pgm", s + ".cam"};
}

Observation load_observation(const std::filesystem::path& mask_path, const std::filesystem::path& depth_path,
                             const CameraIntrinsics& cam) {
  Observation o;
  o.cam = cam;
  o.mask = read_mask_pgm(mask_path);
  o.depth = read_depth_pgm(depth_path);
  if (!o.mask.same_shape(o.depth)) {
    throw DimensionMismatch("observation: mask " + mask_path.string() + " is " + std::to_string(o.mask.width) + "x" +
                            std::to_string(o.mask.height) + " but depth " + depth_path.string() + " is " +
                            std::to_string(o.depth.width) + "x" + std::to_string(o.depth.height));
  }
  if (!o.depth.same_shape(cam.width, cam.height)) {
    throw DimensionMismatch("observation: depth " + depth_path.string() + " is " + std::to_string(o.depth.width) +
                            "x" + std::to_string(o.depth.height) + " but camera field 'width'/'height' is " +
                            std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
  return o;
}

Observation load_observation(const ObservationPaths& paths) {
  return load_observation(paths.mask, paths.depth, load_camera(paths.camera));
}

void save_observation(const Observation& o, const ObservationPaths& paths) {
  write_mask_pgm(paths.mask, o.mask);
  write_depth_pgm(paths.depth, o.depth);
  save_camera(paths.camera, o.cam);
}

}  // namespace handpose
