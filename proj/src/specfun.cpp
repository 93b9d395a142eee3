#include "raddiff/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raddiff::specfun {

namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;
// e^{-x} underflows past this point, and so do E1 and E2.
constexpr double kUnderflow = 746.0;

// E_n(x) for x > 1 by the modified Lentz continued fraction.
double expint_continued_fraction(int n, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + n;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h * std::exp(-x);
  }
  throw std::runtime_error("exp_integral: continued fraction did not converge");
}

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: argument must be positive");
  if (x > kUnderflow) return 0.0;
  if (x > 1.0) return expint_continued_fraction(1, x);
  // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= kMaxIter; ++k) {
    term *= -x / k;
    const double add = -term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return -kEuler - std::log(x) + sum;
}

double exp_integral_e2(double x) {
  if (x < 0.0) throw std::domain_error("exp_integral_e2: argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (x > kUnderflow) return 0.0;
  if (x > 1.0) return expint_continued_fraction(2, x);
  return std::exp(-x) - x * exp_integral_e1(x);
}

double kernel_K(double x) {
  if (x == 0.0) throw std::domain_error("kernel_K: logarithmic singularity at 0");
  return 0.5 * exp_integral_e1(std::abs(x));
}

double kernel_fourier(double xi) {
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double a = std::abs(xi);
  if (a < 1e-4) {
    const double x2 = xi * xi;
    return norm * (1.0 - x2 / 3.0 + x2 * x2 / 5.0);
  }
  return norm * std::atan(xi) / xi;
}

// The closed forms are evaluated through E2, which is the same identity
// (x E1 = e^{-x} - E2) without the cancellation between e^{-x}/2 and x K(x)
// for large x.

double tail_from(double x) {
  if (!(x > 0.0)) throw std::domain_error("tail_from: argument must be positive (tail_from(0+) = 1/2)");
  return 0.5 * exp_integral_e2(x);
}

double head_from(double x) {
  if (!(x > 0.0)) throw std::domain_error("head_from: argument must be positive (head_from(0-) = 1/2)");
  return 1.0 - 0.5 * exp_integral_e2(x);
}

double first_moment_tail(double x) {
  if (x < 0.0) throw std::domain_error("first_moment_tail: argument must be nonnegative");
  if (x == 0.0) return kHalfFirstMoment;
  return 0.25 * (std::exp(-x) + x * exp_integral_e2(x));
}

double second_moment_tail(double x) {
  if (x < 0.0) throw std::domain_error("second_moment_tail: argument must be nonnegative");
  if (x == 0.0) return kHalfSecondMoment;
  const double e = std::exp(-x);
  return (2.0 * e + 2.0 * x * e + x * x * exp_integral_e2(x)) / 6.0;
}

namespace {

double tail_moment(int k, double x) {
  if (x == 0.0) {
    switch (k) {
      case 0: return kHalfMass;
      case 1: return kHalfFirstMoment;
      default: return kHalfSecondMoment;
    }
  }
  switch (k) {
    case 0: return tail_from(x);
    case 1: return first_moment_tail(x);
    default: return second_moment_tail(x);
  }
}

// Integral of s^k K(s) over [a, b] with 0 <= a <= b.
double positive_moment(int k, double a, double b) {
  if (b == a) return 0.0;
  if (std::isinf(b)) return tail_moment(k, a);
  return tail_moment(k, a) - tail_moment(k, b);
}

}  // namespace

double kernel_moment(int k, double a, double b) {
  if (k < 0 || k > 2) throw std::invalid_argument("kernel_moment: k must be 0, 1 or 2");
  if (b < a) throw std::invalid_argument("kernel_moment: empty interval");
  const double parity = (k % 2 == 0) ? 1.0 : -1.0;
  if (a >= 0.0) return positive_moment(k, a, b);
  if (b <= 0.0) return parity * positive_moment(k, -b, -a);
  return parity * positive_moment(k, 0.0, -a) + positive_moment(k, 0.0, b);
}

double kernel_eps_const(double alpha, double eps, double r) {
  if (!(alpha > 0.0) || !(eps > 0.0)) throw std::domain_error("kernel_eps_const: alpha and eps must be positive");
  if (!(r > 0.0)) throw std::domain_error("kernel_eps_const: separation must be positive");
  return alpha * std::exp(-alpha * r / eps) / (4.0 * std::numbers::pi * eps * r * r);
}

double kernel_eps_ball_mass(double alpha, double eps, double r) {
  if (!(alpha > 0.0) || !(eps > 0.0)) throw std::domain_error("kernel_eps_ball_mass: alpha and eps must be positive");
  if (r < 0.0) throw std::domain_error("kernel_eps_ball_mass: radius must be nonnegative");
  return -std::expm1(-alpha * r / eps);
}

}  // namespace raddiff::specfun
