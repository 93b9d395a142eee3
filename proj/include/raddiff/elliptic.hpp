#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/mesh.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/transport.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace raddiff::elliptic {

using BoundaryData = std::function<double(const Vec3&)>;

/// Inverse-distance weighting (power 2) over the `neighbours` nearest map
/// samples; exact at a sample.
class BoundaryInterpolant {
 public:
  explicit BoundaryInterpolant(std::vector<milne::BoundaryValue> map, int neighbours = 4);

  [[nodiscard]] double operator()(const Vec3& p) const;
  [[nodiscard]] const std::vector<milne::BoundaryValue>& samples() const { return map_; }

 private:
  std::vector<milne::BoundaryValue> map_;
  int neighbours_;
};

/// Solution of -div((1/alpha) grad v) = 0 with Dirichlet data, evaluable
/// anywhere in the domain: radial shells (linear in r) or cartesian nodes
/// (the transport stencils).
struct LimitField {
  std::optional<RadialMesh> radial;
  std::optional<CartesianMesh> cartesian;
  Eigen::VectorXd v;
  std::vector<milne::BoundaryValue> boundary;  ///< map the data came from, if any
  double data_min = 0.0;
  double data_max = 0.0;
  int iterations = 0;
  double residual = 0.0;  ///< sup |A v - b| / sup |b|

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(v.size()); }
  [[nodiscard]] const std::vector<Vec3>& points() const;
  [[nodiscard]] double operator()(const Vec3& x) const;
};

/// Radial alpha and constant data U: the flux equation (r^2 v' / alpha)' = 0
/// with v bounded at the center gives v = U.
LimitField solve_limit_radial(const AbsorptionField& alpha, double U, double radius, const Vec3& center = Vec3::Zero());

struct EllipticParams {
  int n = 16;                     ///< cells along the longest box edge, as in the transport mesh
  double tol = 1e-14;             ///< BiCGSTAB relative residual
  int max_iters = 20000;
  double max_face_contrast = 4.0; ///< alpha_j / alpha_i above this across a face needs a finer mesh
};

/// Flux-form seven-point finite differences on the cartesian node layout with
/// harmonic face averages 2 / (alpha_i + alpha_j) of 1/alpha. A face whose
/// far center lies outside is cut at the boundary crossing theta h, and that
/// axis uses the non-uniform second difference over spacings theta_+ h and
/// theta_- h (exact on quadratics). Off-diagonals stay nonpositive with a
/// dominant diagonal. Solved by BiCGSTAB with an incomplete LU
/// preconditioner. Throws std::runtime_error when the solution leaves the
/// range of the boundary data by more than 1e-10 of its scale or the residual
/// exceeds 1e-8, std::invalid_argument when alpha jumps by more than
/// max_face_contrast across a face.
LimitField solve_limit_3d(const ConvexDomain& domain, const AbsorptionField& alpha, const BoundaryData& data,
                          const EllipticParams& params = {});
LimitField solve_limit_3d(const ConvexDomain& domain, const AbsorptionField& alpha,
                          const std::vector<milne::BoundaryValue>& map, const EllipticParams& params = {});

struct Comparison {
  double sup = 0.0;
  double l2 = 0.0;            ///< (sum_i w_i e_i^2)^{1/2} over the compared nodes
  double relative_sup = 0.0;  ///< sup / max |v| over the compared nodes
  std::size_t count = 0;
  bool touches_boundary = false;  ///< margin 0: no convergence claim there
};

/// Errors of u_eps against v at the transport nodes with depth >= margin.
/// Throws std::invalid_argument for a negative margin or an empty set.
Comparison compare_fields(const transport::DomainField& u, const LimitField& v, double margin);

}  // namespace raddiff::elliptic
