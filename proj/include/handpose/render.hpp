#pragma once

#include <optional>
#include <vector>

#include "handpose/camera.hpp"
#include "handpose/geometry.hpp"
#include "handpose/image.hpp"

namespace handpose {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // need not be unit length; hits are reported as ray parameters
};

/// Smallest ray parameter t in [t_min, t_max] at which the ray meets the
/// primitive's surface, or nullopt.
std::optional<double> intersect(const Primitive& p, const Ray& ray, double t_min, double t_max);

/// Direction of the camera ray through the center of pixel (u, v). Its z
/// component is 1, so the ray parameter of a hit equals the hit's depth.
Vec3 pixel_ray(const CameraIntrinsics& cam, int u, int v);

/// Nearest-surface depth per pixel in millimeters (exact, not quantized);
/// 0 where no primitive is hit within [z_near, z_far].
DepthImage render_depth(const HandGeometry& g, const CameraIntrinsics& cam);

/// Same as render_depth, reusing `out`'s storage.
void render_depth_into(const HandGeometry& g, const CameraIntrinsics& cam, DepthImage& out);

/// Rounds every depth to whole millimeters (the stored sensor precision).
void quantize_depth(DepthImage& depth);

/// 1 wherever the depth is defined (nonzero).
SilhouetteMask silhouette_of(const DepthImage& depth);

}  // namespace handpose
