#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace raddiff {

/// Grey incident radiation g(n) on the unit sphere; n is the propagation
/// direction, so radiation enters at a boundary point where n . N < 0.
class AngularSource {
 public:
  enum class Kind { Isotropic, Cone, Tabulated };

  static AngularSource isotropic(double level);
  /// level inside the cap {n : angle(n, axis) <= half_angle}, zero outside.
  static AngularSource cone(const Vec3& axis, double half_angle, double level);
  /// Lat-long grid: values[i * phi.size() + j] at (theta[i], phi[j]) with
  /// n = (sin t cos p, sin t sin p, cos t). Bilinear in (theta, phi), periodic
  /// in phi, clamped in theta, negative values clamped to 0.
  static AngularSource tabulated(std::vector<double> theta, std::vector<double> phi, std::vector<double> values);
  /// CSV with a header and columns theta, phi, value (radians).
  static AngularSource from_csv(const std::string& path);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double value(const Vec3& n) const;
  [[nodiscard]] double operator()(const Vec3& n) const { return value(n); }
  /// Integral of g over the sphere.
  [[nodiscard]] double norm1() const { return norm1_; }
  [[nodiscard]] double norm_inf() const { return norm_inf_; }
  [[nodiscard]] double level() const { return level_; }
  [[nodiscard]] const Vec3& axis() const { return axis_; }
  [[nodiscard]] double half_angle() const { return half_angle_; }
  [[nodiscard]] bool is_zero() const { return norm_inf_ == 0.0; }
  [[nodiscard]] std::string describe() const;

 private:
  AngularSource() = default;

  Kind kind_ = Kind::Isotropic;
  double level_ = 0.0;
  Vec3 axis_ = Vec3::UnitZ();
  double half_angle_ = 0.0;
  double cos_half_ = 1.0;
  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> table_;
  double norm1_ = 0.0;
  double norm_inf_ = 0.0;
};

/// Hemisphere rule in mu = |n . N| (composite Gauss-Legendre, geometrically
/// graded toward mu = 0) times an azimuthal rule. Cone sources integrate the
/// azimuth exactly; tabulated sources use phi_nodes uniform azimuths.
struct HemisphereQuadrature {
  int mu_order = 16;
  double mu_smallest = 1e-6;
  int phi_nodes = 64;
};

/// The half-space source G(x) = integral over n . N < 0 of g(n) e^{-x/|n . N|}.
/// The angular integral over each mu-circle is computed once at construction.
class PlanarSource {
 public:
  PlanarSource(const AngularSource& g, const Vec3& N, const HemisphereQuadrature& q = {});

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] std::vector<double> sample(std::span<const double> xs) const;
  /// G(0), the mass of g over the incoming hemisphere.
  [[nodiscard]] double at_zero() const { return total_; }

 private:
  std::vector<double> mu_;
  std::vector<double> weight_;
  double total_ = 0.0;
};

double planar_source(const AngularSource& g, const Vec3& N, double x, const HemisphereQuadrature& q = {});

/// Azimuthal measure of {phi : n(mu, phi) in the cone} on the circle
/// n . a = mu, for a unit pole a.
double cone_arc_length(const AngularSource& cone, const Vec3& pole, double mu);

/// Sphere rule for the domain source: mu = n . pole on graded panels toward
/// mu = 0 from both sides, uniform azimuths; line integrals of alpha use
/// panels no longer than max_panel_factor * eps.
struct SphereQuadrature {
  int mu_order = 8;
  double mu_smallest = 1e-4;
  int phi_nodes = 32;
  double max_panel_factor = 0.5;
};

/// S(x) = integral over the sphere of g(n) exp(-tau(x, n) / eps), with tau the
/// optical path from the boundary point x_Omega(x, n) to x.
double domain_source(const AngularSource& g, const ConvexDomain& domain, const AbsorptionField& alpha, double eps,
                     const Vec3& x, const SphereQuadrature& q = {});

/// Directions and weights of the sphere rule around a pole, restricted to
/// mu >= mu_min (used for cone caps).
struct DirectionSet {
  std::vector<Vec3> directions;
  std::vector<double> weights;
};
DirectionSet sphere_directions(const Vec3& pole, const SphereQuadrature& q, double mu_min = -1.0);

/// Pole used by domain_source at x: the cone axis for cone sources, otherwise
/// the inward normal at the closest boundary point.
Vec3 domain_source_pole(const AngularSource& g, const ConvexDomain& domain, const Vec3& x);

}  // namespace raddiff
