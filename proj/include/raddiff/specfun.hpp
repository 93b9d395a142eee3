#pragma once

// Exponential-integral kernel calculus.
//
// The one-dimensional transport kernel is the normalized exponential integral
//
//          1   inf  -t
//   K(x) = -   |   e   / t dt  =  E1(|x|) / 2,
//          2   |x|
//
// an even, positive, unit-mass function with a logarithmic singularity at 0.
// Every integral of K that the solvers need is exposed in closed form so that
// quadrature never samples the singular point.

namespace raddiff::specfun {

/// Total mass of K over the real line.
inline constexpr double kTotalMass = 1.0;
/// Mass of K over a half line, the value of tail_from(0+) and head_from(0-).
inline constexpr double kHalfMass = 0.5;
/// First moment of K over a half line, first_moment_tail(0).
inline constexpr double kHalfFirstMoment = 0.25;
/// Second moment of K over a half line, second_moment_tail(0).
inline constexpr double kHalfSecondMoment = 1.0 / 3.0;

/// E1(x) for x > 0, relative error below 1e-12. Power series for x <= 1,
/// continued fraction above.
double exp_integral_e1(double x);

/// E2(x) = e^{-x} - x E1(x) for x >= 0, E2(0) = 1.
double exp_integral_e2(double x);

/// K(x) = E1(|x|)/2. Throws std::domain_error at x == 0.
double kernel_K(double x);

/// Fourier transform of K, arctan(xi) / (xi sqrt(2 pi)), continuous at 0.
double kernel_fourier(double xi);

/// Tail mass: integral of K over (x, inf) = e^{-x}/2 - x K(x), x > 0.
double tail_from(double x);

/// Head mass: integral of K over (-x, inf) = 1 - e^{-x}/2 + x K(x), x > 0.
double head_from(double x);

/// First moment tail: integral of s K(s) over (x, inf), x >= 0.
/// Equals x e^{-x}/4 + e^{-x}/4 - x^2 K(x)/2.
double first_moment_tail(double x);

/// Second moment tail: integral of s^2 K(s) over (x, inf), x >= 0.
/// Equals e^{-x}(x^2 + 2x + 2)/6 - x^3 K(x)/3.
double second_moment_tail(double x);

/// Integral of s^k K(s) over [a, b] for k in {0, 1, 2}, any real a <= b.
/// Assembled from the tail closed forms, accurate when the interval straddles 0.
double kernel_moment(int k, double a, double b);

/// Three-dimensional kernel alpha e^{-alpha r/eps} / (4 pi eps r^2) for a
/// constant absorption coefficient. Throws at r == 0.
double kernel_eps_const(double alpha, double eps, double r);

/// Mass of the three-dimensional kernel inside a ball of radius r around its
/// pole: 1 - e^{-alpha r / eps}.
double kernel_eps_ball_mass(double alpha, double eps, double r);

}  // namespace raddiff::specfun
