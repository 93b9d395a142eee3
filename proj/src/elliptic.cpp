#include "raddiff/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raddiff::elliptic {

BoundaryInterpolant::BoundaryInterpolant(std::vector<milne::BoundaryValue> map, int neighbours)
    : map_(std::move(map)), neighbours_(neighbours) {
  if (map_.empty()) throw std::invalid_argument("boundary interpolant: empty map");
  if (neighbours_ < 1) throw std::invalid_argument("boundary interpolant: need at least one neighbour");
}

double BoundaryInterpolant::operator()(const Vec3& p) const {
  const std::size_t k = std::min(map_.size(), static_cast<std::size_t>(neighbours_));
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) d.emplace_back((map_[i].sample.point - p).squaredNorm(), i);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  if (d.front().first <= 1e-28) return map_[d.front().second].u_inf;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double w = 1.0 / d[j].first;
    num += w * map_[d[j].second].u_inf;
    den += w;
  }
  return num / den;
}

const std::vector<Vec3>& LimitField::points() const {
  static const std::vector<Vec3> none;
  return cartesian ? cartesian->points : none;
}

double LimitField::operator()(const Vec3& x) const {
  if (cartesian) return cartesian->stencil(x).apply(v);
  return radial->stencil((x - radial->center).norm()).apply(v);
}

LimitField solve_limit_radial(const AbsorptionField& alpha, double U, double radius, const Vec3& center) {
  if (!alpha.is_radial()) throw std::invalid_argument("solve_limit_radial: alpha must be radial");
  if (!(radius > 0.0)) throw std::invalid_argument("solve_limit_radial: radius must be positive");
  RadialMesh m;
  m.center = center;
  m.radius = radius;
  m.r = {0.0, radius};
  m.weights = {0.0, 4.0 / 3.0 * std::numbers::pi * radius * radius * radius};
  LimitField f;
  f.radial = std::move(m);
  f.v = Eigen::VectorXd::Constant(2, U);
  f.data_min = f.data_max = U;
  return f;
}

LimitField solve_limit_3d(const ConvexDomain& domain, const AbsorptionField& alpha, const BoundaryData& data,
                          const EllipticParams& params) {
  LimitField f;
  f.cartesian = CartesianMesh::build(domain, params.n);
  const CartesianMesh& m = *f.cartesian;
  const auto n = static_cast<Eigen::Index>(m.size());
  const double h = m.h;
  const double h2 = h * h;

  std::vector<double> a(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) a[i] = alpha.value(m.points[i]);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(m.size() * 7);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  f.data_min = std::numeric_limits<double>::infinity();
  f.data_max = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& c = m.cell_of_node[i];
    const auto row = static_cast<Eigen::Index>(i);
    double diag = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      // per side: face coefficient, distance fraction, neighbour node or boundary value
      std::array<double, 2> coef{}, theta{}, value{};
      std::array<int, 2> node{};
      for (int side = 0; side < 2; ++side) {
        std::array<int, 3> cc = c;
        cc[static_cast<std::size_t>(axis)] += side == 0 ? 1 : -1;
        int j = -1;
        if (cc[0] >= 0 && cc[1] >= 0 && cc[2] >= 0 && cc[0] < m.dims[0] && cc[1] < m.dims[1] && cc[2] < m.dims[2]) {
          j = m.node_of[static_cast<std::size_t>(m.lattice(cc[0], cc[1], cc[2]))];
        }
        const auto k = static_cast<std::size_t>(side);
        node[k] = j;
        if (j >= 0) {
          const double aj = a[static_cast<std::size_t>(j)];
          if (std::max(aj, a[i]) > params.max_face_contrast * std::min(aj, a[i])) {
            throw std::invalid_argument("solve_limit_3d: absorption jumps by more than " +
                                        std::to_string(params.max_face_contrast) + " across a face, refine the mesh");
          }
          coef[k] = 2.0 / (a[i] + aj);
          theta[k] = 1.0;
          continue;
        }
        Vec3 e = Vec3::Zero();
        e[axis] = side == 0 ? 1.0 : -1.0;
        const RayExit hit = domain.ray_exit(m.points[i], -e);
        theta[k] = std::clamp(hit.distance / h, 1e-8, 1.0);
        value[k] = data(hit.point);
        f.data_min = std::min(f.data_min, value[k]);
        f.data_max = std::max(f.data_max, value[k]);
        coef[k] = 2.0 / (a[i] + alpha.value(hit.point));
      }
      const double scale = 2.0 / ((theta[0] + theta[1]) * h2);
      for (std::size_t k = 0; k < 2; ++k) {
        const double w = scale * coef[k] / theta[k];
        diag += w;
        if (node[k] >= 0) {
          entries.emplace_back(row, node[k], -w);
        } else {
          b[row] += w * value[k];
        }
      }
    }
    entries.emplace_back(row, row, diag);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(n, n);
  A.setFromTriplets(entries.begin(), entries.end());

  if (!std::isfinite(f.data_min)) {
    // no face reaches the boundary; the problem is singular without data
    throw std::invalid_argument("solve_limit_3d: mesh has no boundary faces");
  }

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::IncompleteLUT<double>> cg;
  cg.setTolerance(params.tol);
  cg.setMaxIterations(params.max_iters);
  cg.compute(A);
  if (cg.info() != Eigen::Success) throw std::runtime_error("solve_limit_3d: preconditioner setup failed");
  f.v = cg.solve(b);
  f.iterations = static_cast<int>(cg.iterations());
  const double bscale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  f.residual = (A * f.v - b).cwiseAbs().maxCoeff() / bscale;
  if (!(f.residual <= 1e-8)) {
    throw std::runtime_error("solve_limit_3d: residual " + std::to_string(f.residual) + " above 1e-8");
  }

  const double slack = 1e-10 * std::max({1.0, std::abs(f.data_min), std::abs(f.data_max)});
  if (f.v.minCoeff() < f.data_min - slack || f.v.maxCoeff() > f.data_max + slack) {
    throw std::runtime_error("solve_limit_3d: discrete maximum principle violated");
  }
  return f;
}

LimitField solve_limit_3d(const ConvexDomain& domain, const AbsorptionField& alpha,
                          const std::vector<milne::BoundaryValue>& map, const EllipticParams& params) {
  const BoundaryInterpolant data(map);
  LimitField f = solve_limit_3d(domain, alpha, [&data](const Vec3& p) { return data(p); }, params);
  f.boundary = map;
  return f;
}

Comparison compare_fields(const transport::DomainField& u, const LimitField& v, double margin) {
  if (!(margin >= 0.0)) throw std::invalid_argument("compare_fields: margin must be nonnegative");
  const auto& op = *u.op;
  Comparison c;
  c.touches_boundary = margin == 0.0;
  double sum = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < op.size(); ++i) {
    if (op.depth()[i] < margin) continue;
    const double vi = v(op.points()[i]);
    const double e = std::abs(u.u[static_cast<Eigen::Index>(i)] - vi);
    c.sup = std::max(c.sup, e);
    vmax = std::max(vmax, std::abs(vi));
    sum += op.weights()[i] * e * e;
    ++c.count;
  }
  if (c.count == 0) throw std::invalid_argument("compare_fields: no nodes at depth >= margin");
  c.l2 = std::sqrt(sum);
  c.relative_sup = vmax > 0.0 ? c.sup / vmax : c.sup;
  return c;
}

}  // namespace raddiff::elliptic
