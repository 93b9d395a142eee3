#pragma once

// Independent numerical oracles for the closed forms: adaptive double-exponential
// and Gauss-Kronrod quadrature from Boost.Math, never the library's own rules.

#include "raddiff/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

inline double e1(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([](double t) { return std::exp(-t) / t; }, x,
                              std::numeric_limits<double>::infinity());
}

/// Integral of f over (a, b) with b possibly infinite; endpoint singularities allowed.
template <class F>
double integrate(F f, double a, double b) {
  if (std::isinf(b)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, a, b);
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b);
}

/// Integral of s^k K(s) over (a, b), split at 0 so the log singularity sits at an endpoint.
inline double kernel_moment(int k, double a, double b) {
  const auto f = [k](double s) { return std::pow(s, k) * raddiff::specfun::kernel_K(s); };
  if (a < 0.0 && b > 0.0) return integrate(f, a, 0.0) + integrate(f, 0.0, b);
  return integrate(f, a, b);
}

/// (1/sqrt(2 pi)) integral over R of K(x) cos(xi x), by double-exponential Fourier quadrature.
inline double kernel_cosine_transform(double xi) {
  const double norm = 2.0 / std::sqrt(2.0 * std::numbers::pi);
  if (xi == 0.0) return norm * 0.5;
  static boost::math::quadrature::ooura_fourier_cos<double> integrator;
  const auto f = [](double x) { return x > 0.0 ? raddiff::specfun::kernel_K(x) : 0.0; };
  return norm * integrator.integrate(f, xi).first;
}

}  // namespace oracle
