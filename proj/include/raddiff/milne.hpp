#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/quadrature.hpp"
#include "raddiff/sources.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace raddiff::milne {

/// Graded half-line grid: geometric spacing from h0 growing by `ratio` up to
/// h_max, then uniform to y_max.
struct GridParams {
  double y_max = 40.0;
  double h0 = 1e-3;
  double ratio = 1.05;
  double h_max = 0.035;
};

struct HalfLineGrid {
  std::vector<double> y;

  [[nodiscard]] std::size_t size() const { return y.size(); }
  [[nodiscard]] double y_max() const { return y.back(); }
};

HalfLineGrid make_grid(const GridParams& params = {});
/// Halves every spacing.
HalfLineGrid refine(const HalfLineGrid& grid);
/// Throws std::invalid_argument unless y0 = 0, strictly increasing, first
/// spacing <= 1e-3 and all spacings <= 0.25.
void validate(const HalfLineGrid& grid);

/// Discrete maximum-principle witnesses of an assembled operator.
/// Row sums of A are 1 - C_i = tail_from(y_i), which falls below the double
/// resolution of A_ii ~ 1 for y_i beyond ~37; the closed-form value is the
/// witness and the assembled rows are checked against it.
struct RowAudit {
  double max_offdiagonal = 0.0;  ///< largest entry of A off the diagonal (must be <= 0)
  double min_diagonal = 0.0;
  double min_row_sum = 0.0;      ///< min_i (1 - C_i), closed form
  double max_row_defect = 0.0;   ///< max_i |sum_j A_ij - (1 - C_i)|

  [[nodiscard]] bool ok() const {
    return max_offdiagonal <= 0.0 && min_diagonal > 0.0 && min_row_sum > 0.0 && max_row_defect <= 1e-13;
  }
};

/// Product-integration discretization of u -> u - int_0^inf K(. - y) u(y) dy.
/// u is piecewise linear between nodes and constant beyond y_max. Every
/// weight is an exact kernel moment from the closed forms; the diagonal is
/// fixed so each row of W sums to C_i = int_0^inf K(y_i - y) dy. A = I - W is
/// factored once at construction.
class MilneOperator {
 public:
  explicit MilneOperator(HalfLineGrid grid);

  [[nodiscard]] const HalfLineGrid& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return grid_.size(); }
  /// W: the nonnegative quadrature weights of the integral part.
  [[nodiscard]] const Eigen::MatrixXd& weights() const { return w_; }
  [[nodiscard]] Eigen::MatrixXd matrix() const;
  [[nodiscard]] const std::vector<double>& mass() const { return mass_; }
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  [[nodiscard]] RowAudit audit() const;

  /// 1 - C_i = int_{-inf}^{-y_i} K, without cancellation.
  [[nodiscard]] const std::vector<double>& leak() const { return leak_; }

  /// int_0^inf K(y + t) u(y) dy for t > 0 with u interpolated as in the
  /// operator (hat functions plus constant tail).
  [[nodiscard]] double reflected_convolution(const Eigen::VectorXd& u, double t) const;
  /// int_0^40 t (reflected convolution of u)(t) dt on a graded rule; the
  /// weights are assembled once.
  [[nodiscard]] double reflected_first_moment(const Eigen::VectorXd& u) const;
  /// The graded rule on [0, 40] used for first moments.
  [[nodiscard]] const quad::Rule& moment_rule() const { return moment_rule_; }

 private:
  HalfLineGrid grid_;
  Eigen::MatrixXd w_;
  std::vector<double> mass_;
  std::vector<double> leak_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  quad::Rule moment_rule_;
  Eigen::RowVectorXd moment_weights_;
};

MilneOperator assemble_operator(const HalfLineGrid& grid);

struct PicardReport {
  int iterations = 0;
  bool monotone = true;
  bool converged = false;
  double contraction = 0.0;  ///< last ratio of successive update norms
  double bound = 0.0;        ///< a-posteriori distance to the fixed point
  double gap = 0.0;          ///< sup |u_direct - u_picard| on [0, y_max / 2]
};

struct SolveOptions {
  /// Picard steps for the monotone cross-check; 0 skips it.
  int picard_steps = 0;
  double picard_tol = 1e-6;
};

struct HalfLineProfile {
  HalfLineGrid grid;
  Eigen::VectorXd u;
  double residual = 0.0;  ///< sup |A u - G|
  PicardReport picard;
};

/// Direct solve of A u = G. Throws std::runtime_error if the solution dips
/// below -1e-10 (discretization failure), if the Picard sequence decreases
/// (quadrature failure), or if a converged Picard run disagrees with the
/// direct solve by more than picard_tol.
HalfLineProfile solve_milne(const MilneOperator& op, std::span<const double> G, const SolveOptions& options = {});

struct LimitEstimate {
  double u_inf = 0.0;         ///< plateau average with exponential-tail correction
  double u_inf_moment = 0.0;  ///< 3 m1(W)
  double decay_rate = 0.0;    ///< slope of log|u - u_inf| on [5, 20]; NaN for a flat profile
  double relative_gap = 0.0;
  bool flagged = false;       ///< estimators disagree by more than 1 %
};

LimitEstimate milne_limit(const MilneOperator& op, const HalfLineProfile& profile,
                          const std::function<double(double)>& G);

struct BoundaryValue {
  BoundarySample sample;
  double u_inf = 0.0;
  double u_inf_moment = 0.0;
  double decay_rate = 0.0;
  bool flagged = false;
};

/// Boundary temperature functional p -> u_inf(p) at Fibonacci boundary
/// samples. After rescaling y = alpha(p) d / eps the half-space problem does
/// not depend on alpha, which is accepted only for the record.
std::vector<BoundaryValue> boundary_temperature_map(const ConvexDomain& domain, const AngularSource& g,
                                                    const AbsorptionField& alpha, int samples,
                                                    const MilneOperator& op, const HemisphereQuadrature& q = {});

/// max |u(p) - u(q)| / |p - q| over all sample pairs.
double lipschitz_quotient(const std::vector<BoundaryValue>& map);

/// Inverse of u = 4 pi sigma T^4.
double temperature_from_u(double u, double sigma);

}  // namespace raddiff::milne
