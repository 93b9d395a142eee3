#include "raddiff/mesh.hpp"
#include "raddiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace raddiff {

namespace {

// Area of {0 <= y <= a, 0 <= z <= b} inside the disk of radius rho, signed
// (odd) in a and in b.
double quadrant_area(double a, double b, double rho) {
  const double sign = (a < 0.0 ? -1.0 : 1.0) * (b < 0.0 ? -1.0 : 1.0);
  a = std::min(std::abs(a), rho);
  b = std::min(std::abs(b), rho);
  if (a * a + b * b <= rho * rho) return sign * a * b;
  const auto prim = [rho](double y) {
    return 0.5 * (y * std::sqrt(std::max(0.0, rho * rho - y * y)) + rho * rho * std::asin(std::min(1.0, y / rho)));
  };
  const double ystar = std::sqrt(std::max(0.0, rho * rho - b * b));
  return sign * (b * ystar + prim(a) - prim(ystar));
}

double rectangle_in_disk(double y0, double y1, double z0, double z1, double rho) {
  if (rho <= 0.0) return 0.0;
  return quadrant_area(y1, z1, rho) - quadrant_area(y0, z1, rho) - quadrant_area(y1, z0, rho) +
         quadrant_area(y0, z0, rho);
}

}  // namespace

RadialMesh RadialMesh::graded(double radius, const Vec3& center, double eps, const MeshParams& params) {
  if (!(radius > 0.0) || !(eps > 0.0)) throw std::invalid_argument("mesh: radius and eps must be positive");
  if (!(params.grading >= 1.0) || !(params.boundary_spacing > 0.0) || !(params.interior_spacing > 0.0)) {
    throw std::invalid_argument("mesh: grading must be >= 1 and spacings positive");
  }
  const double h_max = std::min(params.interior_spacing, 5.0 * eps);
  std::vector<double> steps;
  double h = std::min(params.boundary_spacing * eps, h_max);
  double total = 0.0;
  while (total < radius) {
    steps.push_back(h);
    total += h;
    h = std::min(h * params.grading, h_max);
  }
  if (steps.size() < 2) {
    steps.assign(2, 0.5 * radius);
    total = radius;
  }
  const double scale = radius / total;

  RadialMesh mesh;
  mesh.center = center;
  mesh.radius = radius;
  mesh.r.resize(steps.size() + 1);
  mesh.r.back() = radius;
  double acc = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    acc += steps[k] * scale;
    mesh.r[steps.size() - 1 - k] = radius - acc;
  }
  mesh.r.front() = 0.0;

  const std::size_t n = mesh.r.size();
  mesh.weights.resize(n);
  const double c = 4.0 * std::numbers::pi / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = (i == 0) ? 0.0 : 0.5 * (mesh.r[i - 1] + mesh.r[i]);
    const double hi = (i + 1 == n) ? radius : 0.5 * (mesh.r[i] + mesh.r[i + 1]);
    mesh.weights[i] = c * (hi * hi * hi - lo * lo * lo);
  }
  return mesh;
}

Stencil RadialMesh::stencil(double rho) const {
  Stencil s;
  if (rho <= 0.0) {
    s.add(0, 1.0);
    return s;
  }
  if (rho >= radius) {
    s.add(static_cast<int>(r.size() - 1), 1.0);
    return s;
  }
  const auto it = std::upper_bound(r.begin(), r.end(), rho);
  const std::size_t j = static_cast<std::size_t>(it - r.begin());
  const double f = (rho - r[j - 1]) / (r[j] - r[j - 1]);
  s.add(static_cast<int>(j - 1), 1.0 - f);
  s.add(static_cast<int>(j), f);
  return s;
}

double box_volume_inside(const ConvexDomain& domain, const Vec3& lo, const Vec3& hi) {
  const Vec3& a = domain.semi_axes();
  const Vec3 l = (lo - domain.center()).cwiseQuotient(a);
  const Vec3 u = (hi - domain.center()).cwiseQuotient(a);
  const double scale = a.prod();
  const Vec3 nearest = Vec3::Zero().cwiseMax(l).cwiseMin(u);
  if (nearest.squaredNorm() >= 1.0) return 0.0;
  const Vec3 far = l.cwiseAbs().cwiseMax(u.cwiseAbs());
  if (far.squaredNorm() <= 1.0) return scale * (u - l).prod();

  const double x0 = std::max(l.x(), -1.0);
  const double x1 = std::min(u.x(), 1.0);
  std::vector<double> breaks{x0, x1};
  const auto add_level = [&](double c2) {
    if (c2 >= 1.0) return;
    const double x = std::sqrt(1.0 - c2);
    for (double s : {-x, x}) {
      if (s > x0 && s < x1) breaks.push_back(s);
    }
  };
  for (double y : {l.y(), u.y()}) {
    add_level(y * y);
    for (double z : {l.z(), u.z()}) add_level(y * y + z * z);
  }
  for (double z : {l.z(), u.z()}) add_level(z * z);
  breaks = quad::merge_breakpoints(std::move(breaks));
  const quad::Rule rule = quad::composite_cosine(breaks, 12);
  double v = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double x = rule.nodes[k];
    const double rho = std::sqrt(std::max(0.0, 1.0 - x * x));
    v += rule.weights[k] * rectangle_in_disk(l.y(), u.y(), l.z(), u.z(), rho);
  }
  return scale * v;
}

Vec3 CartesianMesh::cell_center(int i, int j, int k) const {
  return origin + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

CartesianMesh CartesianMesh::build(const ConvexDomain& domain, int n) {
  if (n < 2) throw std::invalid_argument("mesh: need at least 2 cells per edge");
  CartesianMesh mesh;
  const Vec3 ext = domain.box_max() - domain.box_min();
  mesh.h = ext.maxCoeff() / n;
  for (int d = 0; d < 3; ++d) mesh.dims[static_cast<std::size_t>(d)] = std::max(1, static_cast<int>(std::ceil(ext[d] / mesh.h - 1e-9)));
  const Vec3 span(mesh.dims[0] * mesh.h, mesh.dims[1] * mesh.h, mesh.dims[2] * mesh.h);
  mesh.origin = domain.center() - 0.5 * span;

  const int total = mesh.dims[0] * mesh.dims[1] * mesh.dims[2];
  mesh.node_of.assign(static_cast<std::size_t>(total), -1);
  for (int k = 0; k < mesh.dims[2]; ++k)
    for (int j = 0; j < mesh.dims[1]; ++j)
      for (int i = 0; i < mesh.dims[0]; ++i) {
        const Vec3 c = mesh.cell_center(i, j, k);
        if (domain.implicit(c) < 0.0) {
          mesh.node_of[static_cast<std::size_t>(mesh.lattice(i, j, k))] = static_cast<int>(mesh.points.size());
          mesh.points.push_back(c);
          mesh.cell_of_node.push_back({i, j, k});
        }
      }
  if (mesh.points.empty()) throw std::invalid_argument("mesh: no cell center inside the domain");

  mesh.weights.assign(mesh.points.size(), 0.0);
  const Vec3 half = Vec3::Constant(0.5 * mesh.h);
  for (int k = 0; k < mesh.dims[2]; ++k)
    for (int j = 0; j < mesh.dims[1]; ++j)
      for (int i = 0; i < mesh.dims[0]; ++i) {
        const Vec3 c = mesh.cell_center(i, j, k);
        const double v = box_volume_inside(domain, c - half, c + half);
        if (v <= 0.0) continue;
        int node = mesh.node_of[static_cast<std::size_t>(mesh.lattice(i, j, k))];
        if (node < 0) node = mesh.nearest_node(c);
        mesh.weights[static_cast<std::size_t>(node)] += v;
      }
  return mesh;
}

int CartesianMesh::nearest_node(const Vec3& x) const {
  const Vec3 g = (x - origin) / h;
  std::array<int, 3> c{};
  for (int d = 0; d < 3; ++d) {
    c[static_cast<std::size_t>(d)] = std::clamp(static_cast<int>(std::floor(g[d])), 0, dims[static_cast<std::size_t>(d)] - 1);
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  int found_at = -1;
  const int reach = std::max({dims[0], dims[1], dims[2]});
  for (int rad = 0; rad <= reach; ++rad) {
    if (found_at >= 0 && rad > found_at + 1) break;
    for (int dk = -rad; dk <= rad; ++dk)
      for (int dj = -rad; dj <= rad; ++dj)
        for (int di = -rad; di <= rad; ++di) {
          if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != rad) continue;
          const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
          if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) continue;
          const int node = node_of[static_cast<std::size_t>(lattice(i, j, k))];
          if (node < 0) continue;
          const double d = (points[static_cast<std::size_t>(node)] - x).squaredNorm();
          if (d < best_d || (d == best_d && node < best)) {
            best_d = d;
            best = node;
          }
        }
    if (best >= 0 && found_at < 0) found_at = rad;
  }
  return best;
}

Stencil CartesianMesh::stencil(const Vec3& x) const {
  const Vec3 g = (x - origin) / h - Vec3::Constant(0.5);
  const int i0 = static_cast<int>(std::floor(g.x()));
  const int j0 = static_cast<int>(std::floor(g.y()));
  const int k0 = static_cast<int>(std::floor(g.z()));
  const double fx = g.x() - i0, fy = g.y() - j0, fz = g.z() - k0;
  Stencil s;
  double total = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int a = c & 1, b = (c >> 1) & 1, e = (c >> 2) & 1;
    const int i = i0 + a, j = j0 + b, k = k0 + e;
    if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) continue;
    const int node = node_of[static_cast<std::size_t>(lattice(i, j, k))];
    if (node < 0) continue;
    const double w = (a ? fx : 1.0 - fx) * (b ? fy : 1.0 - fy) * (e ? fz : 1.0 - fz);
    if (w <= 0.0) continue;
    s.add(node, w);
    total += w;
  }
  if (total <= 0.0) {
    s = Stencil{};
    s.add(nearest_node(x), 1.0);
    return s;
  }
  for (int k = 0; k < s.size; ++k) s.weight[static_cast<std::size_t>(k)] /= total;
  return s;
}

}  // namespace raddiff
