#include "raddiff/absorption.hpp"

#include "raddiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace raddiff {

namespace {

constexpr double kBinom6[7] = {1, 6, 15, 20, 15, 6, 1};

// Centered quintic cardinal B-spline (deriv = 0) or its derivative (deriv = 1).
double bspline5(double t, int deriv) {
  if (std::abs(t) >= 3.0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k <= 6; ++k) {
    const double z = t + 3.0 - k;
    if (z <= 0.0) break;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * kBinom6[k] * (deriv == 0 ? std::pow(z, 5) / 120.0 : std::pow(z, 4) / 24.0);
  }
  return sum;
}

double poly(const std::vector<double>& c, double r) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
  return v;
}

double poly_derivative(const std::vector<double>& c, double r) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * r + k * c[k];
  return v;
}

}  // namespace

AbsorptionField AbsorptionField::constant(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("absorption: constant alpha must be positive");
  AbsorptionField f;
  f.kind_ = Kind::Constant;
  f.c0_ = f.c1_ = alpha;
  f.coeffs_ = {alpha};
  return f;
}

AbsorptionField AbsorptionField::radial(std::vector<double> coeffs, const Vec3& center, double r_max) {
  if (coeffs.empty()) throw std::invalid_argument("absorption: radial profile needs coefficients");
  if (!(r_max > 0.0)) throw std::invalid_argument("absorption: radial r_max must be positive");
  AbsorptionField f;
  f.kind_ = Kind::Radial;
  f.coeffs_ = std::move(coeffs);
  f.center_ = center;
  // Bounds by dense sampling plus the interior critical points of the profile.
  const int samples = 4096;
  double lo = poly(f.coeffs_, 0.0);
  double hi = lo;
  for (int i = 1; i <= samples; ++i) {
    const double v = poly(f.coeffs_, r_max * i / samples);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int i = 0; i < samples; ++i) {
    double a = r_max * i / samples;
    double b = r_max * (i + 1) / samples;
    double da = poly_derivative(f.coeffs_, a);
    const double db = poly_derivative(f.coeffs_, b);
    if (da * db >= 0.0) continue;
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (a + b);
      const double dm = poly_derivative(f.coeffs_, m);
      if (dm * da > 0.0) {
        a = m;
        da = dm;
      } else {
        b = m;
      }
    }
    const double v = poly(f.coeffs_, 0.5 * (a + b));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0)) throw std::invalid_argument("absorption: radial profile must stay positive on the domain");
  f.c0_ = lo;
  f.c1_ = hi;
  return f;
}

AbsorptionField AbsorptionField::grid(const Vec3& origin, const Vec3& spacing, std::array<int, 3> dims,
                                      std::vector<double> values) {
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw std::invalid_argument("absorption: grid dims must be >= 1");
  if (values.size() != static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]) {
    throw std::invalid_argument("absorption: grid value count does not match dims");
  }
  if (!(spacing.minCoeff() > 0.0)) throw std::invalid_argument("absorption: grid spacing must be positive");
  AbsorptionField f;
  f.kind_ = Kind::Grid;
  f.origin_ = origin;
  f.spacing_ = spacing;
  f.dims_ = dims;
  f.values_ = std::move(values);
  const auto [lo, hi] = std::minmax_element(f.values_.begin(), f.values_.end());
  if (!(*lo > 0.0)) throw std::invalid_argument("absorption: grid values must be positive");
  f.c0_ = *lo;
  f.c1_ = *hi;
  return f;
}

std::string AbsorptionField::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Constant:
      out << "constant(" << c0_ << ")";
      break;
    case Kind::Radial:
      out << "radial(";
      for (std::size_t k = 0; k < coeffs_.size(); ++k) out << (k ? "," : "") << coeffs_[k];
      out << ")";
      break;
    case Kind::Grid:
      out << "grid(" << dims_[0] << "x" << dims_[1] << "x" << dims_[2] << ")";
      break;
  }
  return out.str();
}

double AbsorptionField::spline(const Vec3& x, int deriv_axis) const {
  std::array<std::array<double, 6>, 3> w{};
  std::array<std::array<int, 6>, 3> idx{};
  for (int d = 0; d < 3; ++d) {
    const double u = (x[d] - origin_[d]) / spacing_[d];
    const int base = static_cast<int>(std::floor(u)) - 2;
    for (int j = 0; j < 6; ++j) {
      const int i = base + j;
      w[d][j] = bspline5(u - i, d == deriv_axis ? 1 : 0);
      if (d == deriv_axis) w[d][j] /= spacing_[d];
      idx[d][j] = std::clamp(i, 0, dims_[d] - 1);
    }
  }
  double sum = 0.0;
  for (int k = 0; k < 6; ++k) {
    for (int j = 0; j < 6; ++j) {
      const double wjk = w[1][j] * w[2][k];
      if (wjk == 0.0) continue;
      const std::size_t row = (static_cast<std::size_t>(idx[2][k]) * dims_[1] + idx[1][j]) * dims_[0];
      for (int i = 0; i < 6; ++i) sum += w[0][i] * wjk * values_[row + idx[0][i]];
    }
  }
  return sum;
}

double AbsorptionField::radial_value(double r) const {
  if (kind_ == Kind::Grid) throw std::logic_error("absorption: radial_value on a grid field");
  return kind_ == Kind::Constant ? c0_ : poly(coeffs_, r);
}

double AbsorptionField::value(const Vec3& x) const {
  switch (kind_) {
    case Kind::Constant: return c0_;
    case Kind::Radial: return poly(coeffs_, (x - center_).norm());
    case Kind::Grid: return std::clamp(spline(x, -1), c0_, c1_);
  }
  return c0_;
}

Vec3 AbsorptionField::gradient(const Vec3& x) const {
  switch (kind_) {
    case Kind::Constant: return Vec3::Zero();
    case Kind::Radial: {
      const Vec3 y = x - center_;
      const double r = y.norm();
      if (r == 0.0) return Vec3::Zero();
      return poly_derivative(coeffs_, r) * y / r;
    }
    case Kind::Grid: return {spline(x, 0), spline(x, 1), spline(x, 2)};
  }
  return Vec3::Zero();
}

double AbsorptionField::optical_depth(const Vec3& x, const Vec3& n, double s, double max_panel) const {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::Constant) return c0_ * s;
  const int panels = std::max(1, static_cast<int>(std::ceil(s / max_panel)));
  const quad::Rule& ref = quad::gauss_legendre(8);
  const double h = s / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) panel += ref.weights[i] * value(x - (mid + 0.5 * h * ref.nodes[i]) * n);
    sum += 0.5 * h * panel;
  }
  return sum;
}

}  // namespace raddiff
