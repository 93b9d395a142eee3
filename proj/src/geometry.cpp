#include "raddiff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace raddiff {

ConvexDomain::ConvexDomain(Shape shape, const Vec3& axes, const Vec3& center)
    : shape_(shape), axes_(axes), center_(center) {
  if (!(axes.minCoeff() > 0.0) || !axes.allFinite() || !center.allFinite()) {
    throw std::invalid_argument("ConvexDomain: semi-axes must be positive and finite");
  }
}

ConvexDomain ConvexDomain::ball(double radius, const Vec3& center) {
  return {Shape::Ball, Vec3::Constant(radius), center};
}

ConvexDomain ConvexDomain::ellipsoid(const Vec3& semi_axes, const Vec3& center) {
  return {Shape::Ellipsoid, semi_axes, center};
}

std::string ConvexDomain::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (is_ball()) {
    out << "ball(radius=" << axes_[0];
  } else {
    out << "ellipsoid(axes=" << axes_[0] << "," << axes_[1] << "," << axes_[2];
  }
  out << ", center=" << center_[0] << "," << center_[1] << "," << center_[2] << ")";
  return out.str();
}

double ConvexDomain::implicit(const Vec3& x) const {
  return (x - center_).cwiseQuotient(axes_).squaredNorm() - 1.0;
}

bool ConvexDomain::contains(const Vec3& x, double tol) const { return implicit(x) <= tol; }

Vec3 ConvexDomain::normal(const Vec3& p) const {
  const Vec3 grad = (p - center_).cwiseQuotient(axes_.cwiseProduct(axes_));
  const double norm = grad.norm();
  if (norm == 0.0) throw std::domain_error("ConvexDomain::normal: undefined at the center");
  return grad / norm;
}

RayExit ConvexDomain::ray_exit(const Vec3& x, const Vec3& n) const {
  const Vec3 y = (x - center_).cwiseQuotient(axes_);
  const Vec3 m = n.cwiseQuotient(axes_);
  const double c = y.squaredNorm() - 1.0;
  if (c > 1e-12) throw std::domain_error("ray_exit: point outside the domain");
  // |y - s m|^2 = 1 for the backward ray
  const double a = m.squaredNorm();
  const double b = y.dot(m);
  const double disc = std::max(b * b - a * c, 0.0);
  const double root = std::sqrt(disc);
  // Stable form of the positive root (b + root) / a.
  const double s = (b >= 0.0) ? (b + root) / a : (-c) / (root - b);
  return {x - s * n, s};
}

Vec3 ConvexDomain::closest_point_local(const Vec3& y) const {
  if (is_ball()) {
    const double r = y.norm();
    if (r == 0.0) return Vec3(axes_[0], 0.0, 0.0);
    return y * (axes_[0] / r);
  }
  const Vec3 a2 = axes_.cwiseProduct(axes_);
  const double m = a2.minCoeff();
  const auto in_min_set = [&](int k) { return a2[k] - m <= 1e-14 * m; };

  double sy = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (in_min_set(k)) sy += y[k] * y[k];
  }
  if (sy == 0.0) {
    // The point lies on the plane through the shortest axes; the closest point
    // may leave that plane.
    Vec3 p = Vec3::Zero();
    double rem = 1.0;
    int first_min = -1;
    for (int k = 0; k < 3; ++k) {
      if (in_min_set(k)) {
        if (first_min < 0) first_min = k;
        continue;
      }
      p[k] = a2[k] * y[k] / (a2[k] - m);
      rem -= p[k] * p[k] / a2[k];
    }
    if (rem > 0.0) {
      p[first_min] = axes_[first_min] * std::sqrt(rem);
      return p;
    }
  }

  const auto f = [&](double t) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double q = axes_[k] * y[k] / (a2[k] + t);
      sum += q * q;
    }
    return sum - 1.0;
  };
  double lo = -m;
  double hi = std::max(0.0, axes_.maxCoeff() * y.norm());
  if (f(hi) > 0.0) hi = 2.0 * hi + 1.0;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return a2.cwiseProduct(y).cwiseQuotient(a2 + Vec3::Constant(t));
}

Projection ConvexDomain::project_boundary(const Vec3& x) const {
  const Vec3 y = x - center_;
  const Vec3 p = closest_point_local(y);
  const double d = (y - p).norm();
  if (implicit(x) < 0.0 && d >= min_curvature_radius()) {
    throw std::domain_error("project_boundary: point deeper than the minimal curvature radius");
  }
  return {p + center_, d};
}

double ConvexDomain::signed_distance(const Vec3& x) const {
  const Vec3 y = x - center_;
  if (is_ball()) return axes_[0] - y.norm();
  const double d = (y - closest_point_local(y)).norm();
  return implicit(x) <= 0.0 ? d : -d;
}

double ConvexDomain::min_curvature_radius() const {
  const double amin = axes_.minCoeff();
  return amin * amin / axes_.maxCoeff();
}

double ConvexDomain::volume() const {
  return 4.0 / 3.0 * std::numbers::pi * axes_.prod();
}

BoundarySample ConvexDomain::sample_at(const Vec3& p) const {
  BoundarySample s;
  s.point = p;
  s.normal = normal(p);
  if (is_ball()) {
    s.curvature_radius = axes_[0];
    return s;
  }
  // Shape operator on the tangent plane: Hessian of the implicit function
  // restricted to the tangent plane over the gradient norm.
  const Vec3 inv_a2 = axes_.cwiseProduct(axes_).cwiseInverse();
  const double grad_norm = 2.0 * (p - center_).cwiseProduct(inv_a2).norm();
  const RigidMotion frame = rigid_motion(s);
  const Vec3 t1 = frame.rotation.row(1).transpose();
  const Vec3 t2 = frame.rotation.row(2).transpose();
  Eigen::Matrix2d w;
  w(0, 0) = 2.0 * t1.cwiseProduct(inv_a2).dot(t1);
  w(0, 1) = 2.0 * t1.cwiseProduct(inv_a2).dot(t2);
  w(1, 0) = w(0, 1);
  w(1, 1) = 2.0 * t2.cwiseProduct(inv_a2).dot(t2);
  w /= grad_norm;
  const double kmax = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(w).eigenvalues().maxCoeff();
  s.curvature_radius = 1.0 / kmax;
  return s;
}

BoundarySample ConvexDomain::sample_in_direction(const Vec3& w) const {
  const double scale = 1.0 / w.cwiseQuotient(axes_).norm();
  return sample_at(center_ + scale * w);
}

std::vector<BoundarySample> ConvexDomain::fibonacci_samples(int count) const {
  std::vector<BoundarySample> out;
  out.reserve(count);
  for (const Vec3& w : fibonacci_sphere(count)) out.push_back(sample_in_direction(w));
  return out;
}

RigidMotion rigid_motion(const BoundarySample& p) {
  const Vec3& n = p.normal;
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
  }
  Vec3 t1 = Vec3::Unit(axis) - n[axis] * n;
  t1.normalize();
  const Vec3 r0 = -n;
  const Vec3 t2 = r0.cross(t1);
  RigidMotion motion;
  motion.rotation.row(0) = r0.transpose();
  motion.rotation.row(1) = t1.transpose();
  motion.rotation.row(2) = t2.transpose();
  motion.translation = -(motion.rotation * p.point);
  return motion;
}

std::vector<Vec3> fibonacci_sphere(int count) {
  if (count < 1) throw std::invalid_argument("fibonacci_sphere: count must be >= 1");
  std::vector<Vec3> points;
  points.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    points.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return points;
}

}  // namespace raddiff
