#include "handpose/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

namespace handpose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps the nearest admissible hit.
struct Hit {
  double t_min;
  double t_max;
  double best = kInf;

  void consider(double t) {
    if (t >= t_min && t <= t_max && t < best) best = t;
  }
  std::optional<double> result() const { return best < kInf ? std::optional<double>(best) : std::nullopt; }
};

// Roots of a t^2 + 2 b t + c = 0 (half-b form), ascending.
bool solve_quadratic(double a, double b, double c, double& t0, double& t1) {
  if (a == 0.0) return false;
  const double disc = b * b - a * c;
  if (disc < 0.0) return false;
  const double root = std::sqrt(disc);
  // Numerically stable pairing of the two roots.
  const double q = b >= 0.0 ? -(b + root) : -(b - root);
  if (q == 0.0) {
    t0 = t1 = 0.0;
    return true;
  }
  t0 = q / a;
  t1 = c / q;
  if (t0 > t1) std::swap(t0, t1);
  return true;
}

void unit_sphere_hits(const Vec3& o, const Vec3& d, Hit& hit) {
  double t0, t1;
  if (solve_quadratic(d.squaredNorm(), o.dot(d), o.squaredNorm() - 1.0, t0, t1)) {
    hit.consider(t0);
    hit.consider(t1);
  }
}

void sphere_hits(const Sphere& s, const Ray& ray, Hit& hit) {
  const Vec3 oc = ray.origin - s.center;
  double t0, t1;
  if (solve_quadratic(ray.direction.squaredNorm(), oc.dot(ray.direction), oc.squaredNorm() - s.radius * s.radius,
                      t0, t1)) {
    hit.consider(t0);
    hit.consider(t1);
  }
}

void ellipsoid_hits(const Ellipsoid& e, const Ray& ray, Hit& hit) {
  const Mat3 rt = e.orientation.transpose();
  const Vec3 o = (rt * (ray.origin - e.center)).cwiseQuotient(e.semi_axes);
  const Vec3 d = (rt * ray.direction).cwiseQuotient(e.semi_axes);
  unit_sphere_hits(o, d, hit);
}

// Flat disk of radius r centered at c with unit normal n.
void disk_hit(const Vec3& c, const Vec3& n, double r, const Ray& ray, Hit& hit) {
  const double denom = n.dot(ray.direction);
  if (denom == 0.0) return;
  const double t = n.dot(c - ray.origin) / denom;
  if ((ray.origin + t * ray.direction - c).squaredNorm() <= r * r) hit.consider(t);
}

void cone_hits(const TruncatedCone& k, const Ray& ray, Hit& hit) {
  const Vec3 axis_vec = k.tip_center - k.base_center;
  const double len = axis_vec.norm();
  if (len == 0.0) return;
  const Vec3 a = axis_vec / len;
  const double slope = (k.tip_radius - k.base_radius) / len;  // radius change per mm along the axis
  const double g = 1.0 + slope * slope;
  const double r0 = k.base_radius;

  // Lateral surface: |w|^2 - g s^2 - 2 r0 slope s - r0^2 = 0 with w = p - base, s = w.a.
  const Vec3 w0 = ray.origin - k.base_center;
  const double s0 = w0.dot(a);
  const double ds = ray.direction.dot(a);
  const double qa = ray.direction.squaredNorm() - g * ds * ds;
  const double qb = w0.dot(ray.direction) - g * s0 * ds - r0 * slope * ds;
  const double qc = w0.squaredNorm() - g * s0 * s0 - 2.0 * r0 * slope * s0 - r0 * r0;
  double t0, t1;
  if (solve_quadratic(qa, qb, qc, t0, t1)) {
    for (const double t : {t0, t1}) {
      const double s = s0 + t * ds;
      // Only the nappe whose radius is positive, within the segment.
      if (s >= 0.0 && s <= len && r0 + slope * s > 0.0) hit.consider(t);
    }
  }
  disk_hit(k.base_center, a, k.base_radius, ray, hit);
  disk_hit(k.tip_center, a, k.tip_radius, ray, hit);
}

void cylinder_hits(const EllipticCylinder& c, const Ray& ray, Hit& hit) {
  const Vec3 minor = c.axis.cross(c.major_axis);
  const Vec3 rel = ray.origin - c.base_center;
  // Scaled local frame where the cross-section is the unit circle.
  const Vec2 o(c.major_axis.dot(rel) / c.half_axes.x(), minor.dot(rel) / c.half_axes.y());
  const Vec2 d(c.major_axis.dot(ray.direction) / c.half_axes.x(), minor.dot(ray.direction) / c.half_axes.y());
  const double oz = c.axis.dot(rel);
  const double dz = c.axis.dot(ray.direction);

  double t0, t1;
  if (solve_quadratic(d.squaredNorm(), o.dot(d), o.squaredNorm() - 1.0, t0, t1)) {
    for (const double t : {t0, t1}) {
      const double z = oz + t * dz;
      if (z >= 0.0 && z <= c.length) hit.consider(t);
    }
  }
  if (dz != 0.0) {
    for (const double cap : {0.0, c.length}) {
      const double t = (cap - oz) / dz;
      if ((o + t * d).squaredNorm() <= 1.0) hit.consider(t);
    }
  }
}

struct BoundingSphere {
  Vec3 center;
  double radius;
};

BoundingSphere bounding_sphere(const Primitive& p) {
  return std::visit(
      [](const auto& prim) -> BoundingSphere {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {prim.center, prim.radius};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return {prim.center, prim.semi_axes.maxCoeff()};
        } else if constexpr (std::is_same_v<T, TruncatedCone>) {
          const double half = 0.5 * (prim.tip_center - prim.base_center).norm();
          return {0.5 * (prim.base_center + prim.tip_center),
                  std::hypot(half, std::max(prim.base_radius, prim.tip_radius))};
        } else {
          const double half = 0.5 * prim.length;
          return {prim.base_center + half * prim.axis, std::hypot(half, prim.half_axes.maxCoeff())};
        }
      },
      p);
}

struct PixelRect {
  int u0, u1, v0, v1;  // inclusive
  bool empty() const { return u0 > u1 || v0 > v1; }
};

// Conservative pixel footprint of a bounding sphere: every pixel whose center
// ray can meet the sphere lies inside the rectangle.
PixelRect footprint(const BoundingSphere& bs, const CameraIntrinsics& cam) {
  const PixelRect full{0, cam.width - 1, 0, cam.height - 1};
  const double z_lo = bs.center.z() - bs.radius;
  const double z_hi = bs.center.z() + bs.radius;
  if (z_hi < cam.z_near || z_lo > cam.z_far) return {0, -1, 0, -1};
  if (z_lo <= 1e-6) return full;

  const auto range = [&](double c, double f, double pp, int size, int& lo, int& hi) {
    double mn = kInf, mx = -kInf;
    for (const double x : {c - bs.radius, c + bs.radius}) {
      for (const double z : {z_lo, z_hi}) {
        const double p = f * x / z + pp;
        mn = std::min(mn, p);
        mx = std::max(mx, p);
      }
    }
    // Pixel i is sampled at i + 0.5.
    const double lo_f = std::floor(mn - 0.5);
    const double hi_f = std::ceil(mx - 0.5);
    lo = static_cast<int>(std::clamp(lo_f, -1.0, static_cast<double>(size)));
    hi = static_cast<int>(std::clamp(hi_f, -1.0, static_cast<double>(size)));
    lo = std::max(lo, 0);
    hi = std::min(hi, size - 1);
  };
  PixelRect r{};
  range(bs.center.x(), cam.fx, cam.cx, cam.width, r.u0, r.u1);
  range(bs.center.y(), cam.fy, cam.cy, cam.height, r.v0, r.v1);
  return r;
}

}  // namespace

std::optional<double> intersect(const Primitive& p, const Ray& ray, double t_min, double t_max) {
  Hit hit{t_min, t_max};
  std::visit(
      [&](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          sphere_hits(prim, ray, hit);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          ellipsoid_hits(prim, ray, hit);
        } else if constexpr (std::is_same_v<T, TruncatedCone>) {
          cone_hits(prim, ray, hit);
        } else {
          cylinder_hits(prim, ray, hit);
        }
      },
      p);
  return hit.result();
}

Vec3 pixel_ray(const CameraIntrinsics& cam, int u, int v) {
  return {(u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0};
}

void render_depth_into(const HandGeometry& g, const CameraIntrinsics& cam, DepthImage& out) {
  if (!out.same_shape(cam.width, cam.height)) out = DepthImage(cam.width, cam.height);
  std::fill(out.data.begin(), out.data.end(), kInf);

  for (const Primitive& prim : g.primitives) {
    const PixelRect rect = footprint(bounding_sphere(prim), cam);
    if (rect.empty()) continue;
    for (int v = rect.v0; v <= rect.v1; ++v) {
      for (int u = rect.u0; u <= rect.u1; ++u) {
        const Ray ray{Vec3::Zero(), pixel_ray(cam, u, v)};
        double& z = out.at(u, v);
        // Shrinking the far limit to the current z-buffer value keeps nearest-wins.
        if (const auto t = intersect(prim, ray, cam.z_near, std::min(z, cam.z_far))) z = *t;
      }
    }
  }
  for (double& z : out.data) {
    if (z == kInf) z = 0.0;
  }
}

DepthImage render_depth(const HandGeometry& g, const CameraIntrinsics& cam) {
  DepthImage out;
  render_depth_into(g, cam, out);
  return out;
}

void quantize_depth(DepthImage& depth) {
  for (double& z : depth.data) z = std::round(z);
}

SilhouetteMask silhouette_of(const DepthImage& depth) {
  SilhouetteMask mask(depth.width, depth.height);
  for (std::size_t i = 0; i < depth.size(); ++i) mask.data[i] = depth.data[i] != 0.0 ? 1 : 0;
  return mask;
}

}  // namespace handpose
