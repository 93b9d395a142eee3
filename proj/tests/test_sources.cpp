#include "doctest.h"
#include "oracles.hpp"

#include "raddiff/sources.hpp"
#include "raddiff/specfun.hpp"

#include <cmath>
#include <numbers>

using namespace raddiff;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force hemisphere integral in (mu, phi): adaptive in mu, many uniform
// azimuths. Only accurate for integrands that are continuous in phi.
double hemisphere_oracle(const AngularSource& g, const Vec3& N, double x) {
  const Vec3 pole = -N;
  const auto m = rigid_motion(BoundarySample{Vec3::Zero(), pole, 1.0});
  const Vec3 t1 = m.rotation.row(1).transpose();
  const Vec3 t2 = m.rotation.row(2).transpose();
  const auto ring = [&](double mu) {
    const double s = std::sqrt(1.0 - mu * mu);
    double sum = 0.0;
    const int n = 512;
    for (int j = 0; j < n; ++j) {
      const double phi = 2 * kPi * (j + 0.5) / n;
      sum += g.value(mu * pole + s * (std::cos(phi) * t1 + std::sin(phi) * t2));
    }
    return sum * 2 * kPi / n * (x == 0.0 ? 1.0 : std::exp(-x / mu));
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(ring, 0.0, 1.0, 10, 1e-10);
}

// Cone source integrated in coordinates around its own axis, valid when the
// whole cap lies in the incoming hemisphere (the integrand is then smooth).
double cone_oracle(const AngularSource& cone, const Vec3& N, double x) {
  const auto m = rigid_motion(BoundarySample{Vec3::Zero(), cone.axis(), 1.0});
  const Vec3 t1 = m.rotation.row(1).transpose();
  const Vec3 t2 = m.rotation.row(2).transpose();
  const auto ring = [&](double c) {
    const double s = std::sqrt(1.0 - c * c);
    double sum = 0.0;
    const int n = 256;
    for (int j = 0; j < n; ++j) {
      const double phi = 2 * kPi * (j + 0.5) / n;
      const Vec3 dir = c * cone.axis() + s * (std::cos(phi) * t1 + std::sin(phi) * t2);
      const double mu = -dir.dot(N);
      REQUIRE(mu > 0.0);
      sum += std::exp(-x / mu);
    }
    return cone.level() * sum * 2 * kPi / n;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(ring, std::cos(cone.half_angle()), 1.0, 10,
                                                                        1e-13);
}

}  // namespace

TEST_CASE("isotropic planar source") {
  const auto g = AngularSource::isotropic(1.0);
  CHECK(g.norm1() == doctest::Approx(4 * kPi));
  const Vec3 N = Vec3::UnitX();
  CHECK(planar_source(g, N, 0.0) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(planar_source(g, N, 1.0) == doctest::Approx(2 * kPi * 0.148495506775922).epsilon(1e-12));
  for (double x : {1e-4, 0.01, 0.3, 2.0, 10.0, 30.0}) {
    CHECK(planar_source(g, N, x) == doctest::Approx(2 * kPi * specfun::exp_integral_e2(x)).epsilon(1e-12));
  }
  CHECK(planar_source(g, N, 40.0) <= g.norm1() * std::exp(-40.0));
  const Vec3 other = Vec3(0.3, -0.5, 0.8).normalized();
  for (double x : {0.0, 0.5, 3.0}) {
    CHECK(std::abs(planar_source(g, other, x) - planar_source(g, N, x)) < 1e-10);
  }
}

TEST_CASE("cone planar source against brute-force hemisphere quadrature") {
  const Vec3 N = Vec3(0.2, 0.1, 1.0).normalized();
  const auto aligned = AngularSource::cone(-N, 0.6, 2.0);
  const PlanarSource G(aligned, N);
  CHECK(G(0.0) == doctest::Approx(aligned.norm1()).epsilon(1e-12));
  const auto tilted = AngularSource::cone(Vec3(1.0, 0.0, -1.0).normalized(), 0.5, 1.0);
  const PlanarSource Gt(tilted, N);
  double prev = Gt(0.0);
  for (double x : {0.0, 0.05, 0.5, 2.0}) {
    CHECK(Gt(x) == doctest::Approx(cone_oracle(tilted, N, x)).epsilon(1e-10));
    CHECK(Gt(x) <= prev + 1e-15);
    prev = Gt(x);
    CHECK(Gt(x) <= tilted.norm1() * std::exp(-x) + 1e-15);
  }
  // a cap pointing out of the domain sends nothing in
  const auto outward = AngularSource::cone(N, 0.4, 1.0);
  CHECK(planar_source(outward, N, 0.0) == 0.0);
}

TEST_CASE("tabulated sources") {
  std::vector<double> theta, phi, values;
  for (int i = 0; i <= 18; ++i) theta.push_back(kPi * i / 18);
  for (int j = 0; j < 36; ++j) phi.push_back(2 * kPi * j / 36);
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = 0; j < phi.size(); ++j) values.push_back(1.5);
  const auto flat = AngularSource::tabulated(theta, phi, values);
  CHECK(flat.norm1() == doctest::Approx(6 * kPi).epsilon(1e-12));
  CHECK(planar_source(flat, Vec3::UnitY(), 0.7) ==
        doctest::Approx(planar_source(AngularSource::isotropic(1.5), Vec3::UnitY(), 0.7)).epsilon(1e-12));

  // g = max(0, n_z) sampled on the grid; exact norm1 = pi for the linear-in-cos data
  values.clear();
  for (double t : theta)
    for (std::size_t j = 0; j < phi.size(); ++j) values.push_back(std::cos(t));
  const auto up = AngularSource::tabulated(theta, phi, values);
  CHECK(up.norm1() == doctest::Approx(kPi).epsilon(5e-3));
  CHECK(up.value(-Vec3::UnitZ()) == 0.0);
  CHECK(up.value(Vec3::UnitZ()) == doctest::Approx(1.0));
  // interpolation is continuous across the phi seam
  const double a = up.value(Vec3(std::cos(-1e-9), std::sin(-1e-9), 0.3).normalized());
  const double b = up.value(Vec3(1.0, 1e-9, 0.3).normalized());
  CHECK(a == doctest::Approx(b).epsilon(1e-8));
  // the bilinear interpolant has kinks along grid lines that the product rule
  // does not follow, so agreement is only to the interpolant's smoothness
  const Vec3 N = Vec3(0.3, 0.2, -1.0).normalized();
  CHECK(planar_source(up, N, 0.4) == doctest::Approx(hemisphere_oracle(up, N, 0.4)).epsilon(1e-3));
}

TEST_CASE("domain source") {
  const auto ball = ConvexDomain::ball(1.0);
  const auto alpha = AbsorptionField::constant(1.5);
  const auto iso = AngularSource::isotropic(1.0);
  for (double eps : {1.0, 0.2}) {
    CHECK(domain_source(iso, ball, alpha, eps, Vec3::Zero()) ==
          doctest::Approx(4 * kPi * std::exp(-1.5 / eps)).epsilon(1e-12));
  }
  // deep interior bound with c0 = alpha
  const Vec3 x(0.2, 0.1, -0.3);
  const double d = ball.signed_distance(x);
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    CHECK(domain_source(iso, ball, alpha, eps, x) <= iso.norm1() * std::exp(-1.5 * d / eps));
  }
  // radial absorption: line integrals through the quadrature agree with closed form at the center
  const auto radial = AbsorptionField::radial({1.0, 0.0, 0.5}, Vec3::Zero(), 1.0);
  CHECK(domain_source(iso, ball, radial, 0.5, Vec3::Zero()) ==
        doctest::Approx(4 * kPi * std::exp(-(1.0 + 1.0 / 6.0) / 0.5)).epsilon(1e-12));

  // cone aligned with the inward normal at a near-boundary point: refinement oracle
  const auto sample = ball.sample_in_direction(Vec3(1, 1, 0).normalized());
  const Vec3 y = sample.point - 0.03 * sample.normal;
  const auto cone = AngularSource::cone(-sample.normal, 0.7, 1.0);
  SphereQuadrature q;
  const double coarse = domain_source(cone, ball, radial, 0.1, y, q);
  q.mu_order *= 2;
  q.phi_nodes *= 2;
  const double mid = domain_source(cone, ball, radial, 0.1, y, q);
  q.mu_order *= 2;
  q.phi_nodes *= 2;
  const double fine = domain_source(cone, ball, radial, 0.1, y, q);
  CHECK(coarse == doctest::Approx(fine).epsilon(1e-6));
  CHECK(mid == doctest::Approx(fine).epsilon(1e-6));
  CHECK(fine > 0.0);
}
