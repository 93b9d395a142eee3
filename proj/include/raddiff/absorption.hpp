#pragma once

#include "raddiff/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace raddiff {

/// Absorption coefficient alpha(x) with bounds 0 < c0 <= alpha <= c1.
///
/// Grid data is smoothed by a tensor-product quintic B-spline whose
/// coefficients are the grid values (Schoenberg's variation-diminishing
/// spline). The result is C^4 and a convex combination of grid values, so the
/// grid bounds carry over exactly.
class AbsorptionField {
 public:
  enum class Kind { Constant, Radial, Grid };

  static AbsorptionField constant(double alpha);
  /// alpha = sum_k coeffs[k] r^k with r = |x - center|; bounds are taken over
  /// r in [0, r_max].
  static AbsorptionField radial(std::vector<double> coeffs, const Vec3& center, double r_max);
  /// Node values on origin + (i,j,k) * spacing, x fastest.
  static AbsorptionField grid(const Vec3& origin, const Vec3& spacing, std::array<int, 3> dims,
                              std::vector<double> values);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_constant() const { return kind_ == Kind::Constant; }
  [[nodiscard]] bool is_radial() const { return kind_ != Kind::Grid; }
  [[nodiscard]] double lower() const { return c0_; }
  [[nodiscard]] double upper() const { return c1_; }
  [[nodiscard]] const Vec3& center() const { return center_; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] double value(const Vec3& x) const;
  [[nodiscard]] double operator()(const Vec3& x) const { return value(x); }
  [[nodiscard]] Vec3 gradient(const Vec3& x) const;
  /// Profile alpha(r) for constant and radial kinds.
  [[nodiscard]] double radial_value(double r) const;

  /// Line integral of alpha over the segment x - t n, t in [0, s], by
  /// composite Gauss-Legendre with panels no longer than max_panel.
  [[nodiscard]] double optical_depth(const Vec3& x, const Vec3& n, double s, double max_panel) const;

 private:
  AbsorptionField() = default;
  [[nodiscard]] double spline(const Vec3& x, int deriv_axis) const;

  Kind kind_ = Kind::Constant;
  double c0_ = 1.0;
  double c1_ = 1.0;
  std::vector<double> coeffs_;
  Vec3 center_ = Vec3::Zero();
  Vec3 origin_ = Vec3::Zero();
  Vec3 spacing_ = Vec3::Ones();
  std::array<int, 3> dims_{};
  std::vector<double> values_;
};

}  // namespace raddiff
