#include "raddiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace raddiff::quad {

namespace {

// Returns P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int order, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= order; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, order * (x * p1 - p0) / (x * x - 1.0)};
}

Rule compute_gauss_legendre(int order) {
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    // Tricomi initial guess, refined by Newton.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    if (order == 1) {
      slot = std::make_unique<Rule>(Rule{{0.0}, {2.0}});
    } else {
      slot = std::make_unique<Rule>(compute_gauss_legendre(order));
    }
  }
  return *slot;
}

Rule gauss_legendre(int order, double a, double b) {
  const Rule& ref = gauss_legendre(order);
  Rule rule;
  rule.nodes.resize(ref.size());
  rule.weights.resize(ref.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    rule.nodes[i] = mid + half * ref.nodes[i];
    rule.weights[i] = half * ref.weights[i];
  }
  return rule;
}

Rule composite(std::span<const double> breakpoints, int order) {
  const Rule& ref = gauss_legendre(order);
  Rule rule;
  if (breakpoints.size() < 2) return rule;
  rule.nodes.reserve((breakpoints.size() - 1) * ref.size());
  rule.weights.reserve(rule.nodes.capacity());
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p];
    const double b = breakpoints[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      rule.nodes.push_back(mid + half * ref.nodes[i]);
      rule.weights.push_back(half * ref.weights[i]);
    }
  }
  return rule;
}

Rule composite_cosine(std::span<const double> breakpoints, int order) {
  const Rule& ref = gauss_legendre(order);
  Rule rule;
  if (breakpoints.size() < 2) return rule;
  const double pi = std::numbers::pi;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double a = breakpoints[p];
    const double b = breakpoints[p + 1];
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double s = 0.5 * (ref.nodes[i] + 1.0);
      rule.nodes.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(pi * s)));
      rule.weights.push_back(0.5 * ref.weights[i] * (b - a) * 0.5 * pi * std::sin(pi * s));
    }
  }
  return rule;
}

std::vector<double> geometric_breakpoints(double length, double smallest) {
  std::vector<double> points{0.0};
  if (!(length > 0.0)) return points;
  double edge = std::min(smallest, length);
  while (edge < 0.5 * length) {
    points.push_back(edge);
    edge *= 2.0;
  }
  points.push_back(length);
  return points;
}

std::vector<double> merge_breakpoints(std::vector<double> points, double tol) {
  std::sort(points.begin(), points.end());
  std::vector<double> out;
  out.reserve(points.size());
  for (double p : points) {
    if (out.empty() || p - out.back() > tol) out.push_back(p);
  }
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels,
                 int order) {
  const Rule& ref = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) panel += ref.weights[i] * f(mid + 0.5 * h * ref.nodes[i]);
    sum += 0.5 * h * panel;
  }
  return sum;
}

}  // namespace raddiff::quad
