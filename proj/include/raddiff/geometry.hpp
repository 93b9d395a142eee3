#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace raddiff {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Boundary point with its outward unit normal and smallest principal
/// curvature radius there.
struct BoundarySample {
  Vec3 point;
  Vec3 normal;
  double curvature_radius = 0.0;
};

/// Maps an anchor boundary point to the origin and its outward normal to -e1.
struct RigidMotion {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  [[nodiscard]] Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  [[nodiscard]] Vec3 apply_vector(const Vec3& v) const { return rotation * v; }
  [[nodiscard]] Vec3 inverse(const Vec3& y) const { return rotation.transpose() * (y - translation); }
};

struct RayExit {
  Vec3 point;
  double distance = 0.0;
};

struct Projection {
  Vec3 point;
  double distance = 0.0;
};

/// Ball or axis-aligned ellipsoid. Immutable after construction.
class ConvexDomain {
 public:
  enum class Shape { Ball, Ellipsoid };

  static ConvexDomain ball(double radius, const Vec3& center = Vec3::Zero());
  static ConvexDomain ellipsoid(const Vec3& semi_axes, const Vec3& center = Vec3::Zero());

  [[nodiscard]] Shape shape() const { return shape_; }
  [[nodiscard]] const Vec3& center() const { return center_; }
  [[nodiscard]] const Vec3& semi_axes() const { return axes_; }
  [[nodiscard]] bool is_ball() const { return shape_ == Shape::Ball; }
  [[nodiscard]] std::string describe() const;

  /// sum_k ((x_k - c_k)/a_k)^2 - 1: negative inside, zero on the boundary.
  [[nodiscard]] double implicit(const Vec3& x) const;
  [[nodiscard]] bool contains(const Vec3& x, double tol = 0.0) const;

  /// Outward unit normal at (or radially through) a boundary point.
  [[nodiscard]] Vec3 normal(const Vec3& p) const;

  /// Boundary point x_Omega and distance s with x = x_Omega + s n.
  /// Throws std::domain_error if x is outside the closed domain.
  [[nodiscard]] RayExit ray_exit(const Vec3& x, const Vec3& n) const;

  /// Closest boundary point. Throws std::domain_error for interior points at
  /// depth >= min_curvature_radius(), where uniqueness is not guaranteed.
  [[nodiscard]] Projection project_boundary(const Vec3& x) const;

  /// dist(x, boundary), positive inside and negative outside.
  [[nodiscard]] double signed_distance(const Vec3& x) const;

  [[nodiscard]] double min_curvature_radius() const;
  [[nodiscard]] double diameter() const { return 2.0 * axes_.maxCoeff(); }
  [[nodiscard]] double volume() const;
  /// Upper bound for |x| over the closed domain (exact for a centered ball).
  [[nodiscard]] double max_norm() const { return center_.norm() + axes_.maxCoeff(); }
  [[nodiscard]] Vec3 box_min() const { return center_ - axes_; }
  [[nodiscard]] Vec3 box_max() const { return center_ + axes_; }

  [[nodiscard]] BoundarySample sample_at(const Vec3& p) const;
  /// Boundary point hit by the ray from the center in direction w.
  [[nodiscard]] BoundarySample sample_in_direction(const Vec3& w) const;
  /// Fibonacci-sphere directions mapped to the boundary.
  [[nodiscard]] std::vector<BoundarySample> fibonacci_samples(int count) const;

 private:
  ConvexDomain(Shape shape, const Vec3& axes, const Vec3& center);
  [[nodiscard]] Vec3 closest_point_local(const Vec3& y) const;

  Shape shape_;
  Vec3 axes_;
  Vec3 center_;
};

/// Deterministic rigid motion for a boundary sample: rows of the rotation are
/// (-N, t1, t2) with t1 from Gram-Schmidt on the coordinate axis where |N_k| is
/// smallest (lowest index on ties) and t2 = -N x t1.
RigidMotion rigid_motion(const BoundarySample& p);

/// Fibonacci lattice on the unit sphere.
std::vector<Vec3> fibonacci_sphere(int count);

}  // namespace raddiff
