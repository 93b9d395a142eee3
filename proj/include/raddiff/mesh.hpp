#pragma once

#include "raddiff/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace raddiff {

struct MeshParams {
  int n = 16;                      ///< cartesian cells along the longest box edge
  double grading = 1.15;           ///< radial spacing growth factor away from the boundary
  double boundary_spacing = 0.25;  ///< near-boundary radial spacing in units of eps
  double interior_spacing = 0.05;  ///< radial spacing cap, further capped at 5 eps
};

/// Interpolation weights onto mesh nodes: nonnegative, summing to one.
struct Stencil {
  std::array<int, 8> index{};
  std::array<double, 8> weight{};
  int size = 0;

  void add(int i, double w) {
    index[static_cast<std::size_t>(size)] = i;
    weight[static_cast<std::size_t>(size)] = w;
    ++size;
  }
  [[nodiscard]] double apply(const Eigen::VectorXd& u) const {
    double s = 0.0;
    for (int k = 0; k < size; ++k) s += weight[static_cast<std::size_t>(k)] * u[index[static_cast<std::size_t>(k)]];
    return s;
  }
};

/// Shells of a ball: nodes 0 = r_0 < ... < r_N = R, spacing <= boundary_spacing
/// * eps next to the boundary and growing geometrically inward. Weights are
/// the exact volumes of the shells between midpoints.
struct RadialMesh {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  std::vector<double> r;
  std::vector<double> weights;

  static RadialMesh graded(double radius, const Vec3& center, double eps, const MeshParams& params);

  [[nodiscard]] std::size_t size() const { return r.size(); }
  /// Linear in r between shells.
  [[nodiscard]] Stencil stencil(double radius_at) const;
  [[nodiscard]] double boundary_spacing() const { return r.back() - r[r.size() - 2]; }
};

/// Cell centers of a cubic lattice over the bounding box that lie inside the
/// domain. A node's weight is the exact volume of its cell inside the domain
/// plus the volume of neighbouring cut cells whose centers fall outside.
struct CartesianMesh {
  Vec3 origin = Vec3::Zero();
  double h = 0.0;
  std::array<int, 3> dims{};
  std::vector<int> node_of;  ///< lattice cell -> node, -1 outside
  std::vector<std::array<int, 3>> cell_of_node;
  std::vector<Vec3> points;
  std::vector<double> weights;

  static CartesianMesh build(const ConvexDomain& domain, int n);

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] int lattice(int i, int j, int k) const { return i + dims[0] * (j + dims[1] * k); }
  [[nodiscard]] Vec3 cell_center(int i, int j, int k) const;
  /// Trilinear over inside centers, renormalized; nearest inside node when no
  /// surrounding center is inside.
  [[nodiscard]] Stencil stencil(const Vec3& x) const;
  [[nodiscard]] int nearest_node(const Vec3& x) const;
};

/// Volume of the axis-aligned box [lo, hi] inside a ball or ellipsoid.
double box_volume_inside(const ConvexDomain& domain, const Vec3& lo, const Vec3& hi);

}  // namespace raddiff
