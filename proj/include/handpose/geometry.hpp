#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

namespace handpose {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// All primitives live in camera-frame millimeters.

struct Sphere {
  Vec3 center;
  double radius;
};

/// Frustum between two circular cross-sections, closed by flat caps.
struct TruncatedCone {
  Vec3 base_center;
  Vec3 tip_center;
  double base_radius;
  double tip_radius;
};

/// `orientation` columns are the unit directions of the three semi-axes.
struct Ellipsoid {
  Vec3 center;
  Vec3 semi_axes;
  Mat3 orientation;
};

/// Finite elliptic cylinder with flat caps. `major_axis` is the unit direction
/// of half_axes.x(); half_axes.y() lies along axis x major_axis.
struct EllipticCylinder {
  Vec3 base_center;
  Vec3 axis;  // unit
  Vec3 major_axis;  // unit, perpendicular to axis
  Vec2 half_axes;
  double length;
};

using Primitive = std::variant<Sphere, TruncatedCone, Ellipsoid, EllipticCylinder>;

struct HandGeometry {
  std::vector<Primitive> primitives;
};

/// Primitive reference point (sphere/ellipsoid center, cone/cylinder base).
Vec3 primitive_anchor(const Primitive& p);

/// Rigid translation of every primitive.
HandGeometry translated(const HandGeometry& g, const Vec3& t);

}  // namespace handpose
