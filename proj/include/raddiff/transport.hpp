#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/mesh.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/sources.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace raddiff::transport {

/// Sphere average of K_eps(x - eta) over |eta| = rho as a density in rho, for
/// constant alpha: (rho / (eps' r)) [K(|r - rho| / eps') - K((r + rho) / eps')]
/// with eps' = eps / alpha. Throws std::domain_error at r == rho and for
/// non-positive radii.
double radial_kernel(double r, double rho, double alpha, double eps);

enum class Layout { Auto, Radial, Cartesian };

struct TransportParams {
  Layout layout = Layout::Auto;
  MeshParams mesh;
  int mu_order = 4;         ///< radial: Gauss-Legendre nodes per panel in nu
  int mu_panels = 32;       ///< radial: uniform panels in nu before tangency breakpoints
  int polar_cells = 16;     ///< cartesian: direction cells in cos(theta)
  int azimuth_cells = 32;   ///< cartesian: direction cells in phi
  double ray_step = 0.5;    ///< cartesian: ray sampling step in units of h
  int alpha_order = 4;      ///< Gauss-Legendre nodes per ray segment for variable alpha
  double sigma_cut = 40.0;  ///< rays are closed beyond this optical depth
  std::size_t dense_limit = 8192;
};

/// A node on the backward characteristic x - t n: optical depth sigma =
/// tau / eps from x and the interpolation stencil of u there.
struct RayNode {
  double t = 0.0;
  double sigma = 0.0;
  Stencil stencil;
};

struct Ray {
  std::vector<RayNode> nodes;
  bool closed = false;  ///< cut at sigma_cut before reaching the boundary
};

struct AngularRule {
  std::vector<Vec3> directions;  ///< propagation directions n
  std::vector<double> weights;   ///< sum to 4 pi
};

/// Discretization of u -> int_Omega K_eps(x; eta) u(eta) d eta on a mesh.
///
/// Every node integrates over directions; along each backward characteristic
/// u is linear in optical depth between ray nodes and the exponential moments
/// are exact. Constants are therefore mapped to 1 - e^{-tau/eps} per ray, and
/// an isotropic source paired with the same rule reproduces u = 4 pi c to
/// roundoff. The small ball around the node is the first ray segment, whose
/// mass is 1 - e^{-alpha r / eps} for constant alpha.
///
/// Radial layout: ball with radially symmetric alpha; rays cross the mesh
/// shells exactly and the rule in nu = cos(ray, radial) breaks at tangencies.
/// Cartesian layout: lattice cell centers, trilinear stencils, product cells
/// in (cos theta, phi) with midpoint directions.
class TransportOperator {
 public:
  TransportOperator(const ConvexDomain& domain, const AbsorptionField& alpha, double eps,
                    const TransportParams& params = {});

  [[nodiscard]] Layout layout() const { return layout_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] const ConvexDomain& domain() const { return domain_; }
  [[nodiscard]] const AbsorptionField& alpha() const { return alpha_; }
  [[nodiscard]] const TransportParams& params() const { return params_; }
  [[nodiscard]] const std::vector<Vec3>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  /// Distance of each node to the boundary.
  [[nodiscard]] const std::vector<double>& depth() const { return depth_; }
  /// Mesh spacing at the boundary; the mesh resolves eps when <= eps / 4.
  [[nodiscard]] double boundary_spacing() const { return boundary_spacing_; }
  [[nodiscard]] bool resolved() const { return boundary_spacing_ <= 0.25 * eps_ * (1.0 + 1e-12); }
  [[nodiscard]] const std::optional<RadialMesh>& radial_mesh() const { return radial_; }
  [[nodiscard]] const std::optional<CartesianMesh>& cartesian_mesh() const { return cartesian_; }
  [[nodiscard]] bool dense() const { return dense_; }
  /// Row i of the discrete kernel (assembled on demand in matrix-free mode).
  [[nodiscard]] Eigen::VectorXd kernel_row(std::size_t i) const;

  [[nodiscard]] Stencil stencil(const Vec3& x) const;
  [[nodiscard]] double interpolate(const Eigen::VectorXd& u, const Vec3& x) const;
  [[nodiscard]] Ray trace(const Vec3& x, const Vec3& n) const;
  [[nodiscard]] AngularRule directions_at(const Vec3& x) const;
  /// Average of g over the angular cell containing n (cartesian) or g(n).
  [[nodiscard]] double source_average(const AngularSource& g, const Vec3& n) const;

  /// (int_Omega K_eps u)_i.
  [[nodiscard]] Eigen::VectorXd apply_kernel(const Eigen::VectorXd& u) const;
  /// int_Omega K_eps(x; eta) f(eta) d eta at any x by the same rays, with f
  /// sampled on the ray nodes. The radial layout sweeps its nu rule over
  /// `azimuths` rotations about the radial direction; one suffices for
  /// radially symmetric f.
  [[nodiscard]] double apply_function(const Vec3& x, const std::function<double(const Vec3&)>& f,
                                      int azimuths = 16) const;
  /// int_Omega K_eps(x_i; .) by the same quadrature; < 1.
  [[nodiscard]] const Eigen::VectorXd& row_mass() const { return mass_; }
  /// 1 - row mass without cancellation: sum_d w_d e^{-sigma_d} / (4 pi) with
  /// sigma_d the optical depth where ray d ends (boundary or cut).
  [[nodiscard]] const Eigen::VectorXd& leak() const { return leak_; }
  /// S_i = sum_d w_d gbar_d e^{-tau(x_i, n_d) / eps}.
  [[nodiscard]] Eigen::VectorXd source(const AngularSource& g) const;
  /// Ray part of the intensity: int_0^s (alpha / eps) e^{-tau / eps} u(x - t n) / (4 pi) dt.
  [[nodiscard]] double ray_integral(const Ray& ray, const Eigen::VectorXd& u) const;

 private:
  void build_radial();
  void build_cartesian();
  void assemble();
  [[nodiscard]] Ray trace_radial(double r, double nu) const;
  [[nodiscard]] Ray trace_cartesian(const Vec3& x, const Vec3& n) const;
  [[nodiscard]] double kernel_row(std::size_t i, const Eigen::VectorXd* u, double* row) const;

  ConvexDomain domain_;
  AbsorptionField alpha_;
  double eps_;
  TransportParams params_;
  Layout layout_ = Layout::Radial;
  std::optional<RadialMesh> radial_;
  std::optional<CartesianMesh> cartesian_;
  std::vector<Vec3> points_;
  std::vector<double> weights_;
  std::vector<double> depth_;
  double boundary_spacing_ = 0.0;
  AngularRule global_rule_;
  std::vector<AngularRule> node_rules_;
  std::vector<std::vector<double>> escape_;  ///< per node and direction, e^{-tau/eps} or 0 for closed rays
  Eigen::VectorXd mass_;
  Eigen::VectorXd leak_;
  bool dense_ = true;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> matrix_;
};

struct SolveParams {
  double tol = 1e-10;
  int max_iters = 200000;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double contraction = 0.0;     ///< last ratio of successive sup-norm updates
  double update = 0.0;          ///< last sup-norm update
  double error_estimate = 0.0;  ///< contraction / (1 - contraction) * update
  double residual = 0.0;        ///< sup |u - K u - S|
};

struct DomainField {
  std::shared_ptr<const TransportOperator> op;
  Eigen::VectorXd u;
  Eigen::VectorXd source;
  SolveReport report;

  [[nodiscard]] double eps() const { return op->eps(); }
  [[nodiscard]] double operator()(const Vec3& x) const { return op->interpolate(u, x); }
};

std::shared_ptr<const TransportOperator> make_operator(const ConvexDomain& domain, const AbsorptionField& alpha,
                                                       double eps, const TransportParams& params = {},
                                                       const AngularSource* g = nullptr);

/// Picard iteration u <- K u + S from u = 0. Stops once the sup-norm update
/// and the extrapolated error contraction / (1 - contraction) * update are
/// both <= tol * max|u|. Throws std::runtime_error if the measured
/// contraction reaches 1, if the iterates decrease, or if u dips below
/// -1e-10 max|u|.
DomainField solve_ueps(std::shared_ptr<const TransportOperator> op, Eigen::VectorXd source,
                       const SolveParams& params = {});
DomainField solve_ueps(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g, double eps,
                       const TransportParams& params = {}, const SolveParams& solve = {});

/// J(x, n) = gbar(n) e^{-tau / eps} + ray integral of u, with the field's
/// absorption and quadrature.
double reconstruct_intensity(const DomainField& field, const AngularSource& g, const Vec3& x, const Vec3& n);

/// |u(x) - int_S2 J(x, n) dn| / max(u(x), 1) at each probe, the algebraic form
/// of div F = 0.
std::vector<double> flux_divergence_residual(const DomainField& field, const AngularSource& g,
                                             std::span<const Vec3> probes);

struct LayerMatch {
  double sup_difference = 0.0;
  double at_depth = 0.0;  ///< t where the sup is attained
};

/// max over t in (0, sqrt(eps)] of |u_eps(p - t N) - u_bar(alpha(p) t / eps)|
/// with u_bar the Milne profile at p, linear on its grid and constant beyond.
LayerMatch boundary_layer_match(const DomainField& field, const milne::HalfLineProfile& profile,
                                const BoundarySample& p);

}  // namespace raddiff::transport
