#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace raddiff::quad {

/// Nodes and weights of a one-dimensional rule on a fixed interval.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule of the given order on [-1, 1]. Cached per order.
const Rule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int order, double a, double b);

/// Composite Gauss-Legendre over consecutive breakpoints.
Rule composite(std::span<const double> breakpoints, int order);

/// Composite rule with the cosine substitution x = a + (b-a)(1-cos(pi s))/2 on
/// every panel, which absorbs square-root endpoint singularities.
Rule composite_cosine(std::span<const double> breakpoints, int order);

/// Breakpoints 0 = b_0 < ... < b_n = length, geometric toward 0 with the given
/// smallest panel, doubling until panels reach `length / 2`.
std::vector<double> geometric_breakpoints(double length, double smallest);

/// Merge and sort breakpoint lists, dropping duplicates closer than `tol`.
std::vector<double> merge_breakpoints(std::vector<double> points, double tol = 1e-14);

/// Integral of f over [a, b] with a composite Gauss-Legendre rule of `panels`
/// equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 1, int order = 16);

}  // namespace raddiff::quad
