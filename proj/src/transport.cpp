#include "raddiff/transport.hpp"
#include "raddiff/quadrature.hpp"
#include "raddiff/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raddiff::transport {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

// Exponential moments over [sa, sb] of the two hat functions in optical depth.
void hat_moments(double sa, double sb, double& wa, double& wb) {
  const double ea = std::exp(-sa);
  const double d = sb - sa;
  if (d < 1e-3) {
    wa = ea * d * (0.5 - d * (1.0 / 6.0 - d * (1.0 / 24.0 - d / 120.0)));
    wb = ea * d * (0.5 - d * (1.0 / 3.0 - d * (1.0 / 8.0 - d / 30.0)));
  } else {
    const double f = -std::expm1(-d) / d;
    wa = ea * (1.0 - f);
    wb = ea * (f - std::exp(-d));
  }
}

// Quadrature weights on the ray nodes. A closed ray drops its remainder
// e^{-sigma}, which is counted as leak.
template <class Visit>
void visit_ray_nodes(const Ray& ray, double scale, Visit&& visit) {
  const auto& nodes = ray.nodes;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    double wa = 0.0, wb = 0.0;
    hat_moments(nodes[k].sigma, nodes[k + 1].sigma, wa, wb);
    visit(k, scale * wa);
    visit(k + 1, scale * wb);
  }
}

template <class Visit>
void visit_ray(const Ray& ray, double scale, Visit&& visit) {
  visit_ray_nodes(ray, scale, [&](std::size_t k, double w) {
    const Stencil& s = ray.nodes[k].stencil;
    for (int m = 0; m < s.size; ++m) visit(s.index[static_cast<std::size_t>(m)], w * s.weight[static_cast<std::size_t>(m)]);
  });
}

double escape_of(const Ray& ray) { return ray.closed ? 0.0 : std::exp(-ray.nodes.back().sigma); }
double leak_of(const Ray& ray) { return std::exp(-ray.nodes.back().sigma); }

Vec3 perpendicular(const Vec3& e) {
  return rigid_motion(BoundarySample{Vec3::Zero(), e, 1.0}).rotation.row(1).transpose();
}

Stencil single(int i) {
  Stencil s;
  s.add(i, 1.0);
  return s;
}

}  // namespace

double radial_kernel(double r, double rho, double alpha, double eps) {
  if (!(r > 0.0) || !(rho > 0.0)) throw std::domain_error("radial_kernel: radii must be positive");
  if (r == rho) throw std::domain_error("radial_kernel: logarithmic singularity at r == rho");
  const double ep = eps / alpha;
  return rho / (ep * r) * (specfun::kernel_K(std::abs(r - rho) / ep) - specfun::kernel_K((r + rho) / ep));
}

TransportOperator::TransportOperator(const ConvexDomain& domain, const AbsorptionField& alpha, double eps,
                                     const TransportParams& params)
    : domain_(domain), alpha_(alpha), eps_(eps), params_(params) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("transport: eps must be positive");
  if (params.mu_order < 1 || params.mu_panels < 1 || params.polar_cells < 1 || params.azimuth_cells < 1 ||
      !(params.ray_step > 0.0) || params.alpha_order < 1 || !(params.sigma_cut > 0.0)) {
    throw std::invalid_argument("transport: invalid quadrature parameters");
  }
  const double r_ball = domain.semi_axes().x();
  const bool radial_alpha =
      alpha.is_constant() ||
      (alpha.kind() == AbsorptionField::Kind::Radial && (alpha.center() - domain.center()).norm() <= 1e-12 * (1.0 + r_ball));
  layout_ = params.layout;
  if (layout_ == Layout::Auto) layout_ = (domain.is_ball() && radial_alpha) ? Layout::Radial : Layout::Cartesian;
  if (layout_ == Layout::Radial) {
    if (!domain.is_ball()) throw std::invalid_argument("transport: radial layout needs a ball");
    if (!radial_alpha) throw std::invalid_argument("transport: radial layout needs alpha symmetric about the center");
    build_radial();
  } else {
    build_cartesian();
  }
  assemble();
}

void TransportOperator::build_radial() {
  const double R = domain_.semi_axes().x();
  radial_ = RadialMesh::graded(R, domain_.center(), eps_, params_.mesh);
  const auto& m = *radial_;
  for (std::size_t i = 0; i < m.size(); ++i) {
    points_.push_back(domain_.center() + m.r[i] * Vec3::UnitX());
    depth_.push_back(R - m.r[i]);
  }
  weights_ = m.weights;
  boundary_spacing_ = m.boundary_spacing();
  node_rules_.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) node_rules_[i] = directions_at(points_[i]);
}

void TransportOperator::build_cartesian() {
  cartesian_ = CartesianMesh::build(domain_, params_.mesh.n);
  const auto& m = *cartesian_;
  points_ = m.points;
  weights_ = m.weights;
  for (const Vec3& p : points_) depth_.push_back(domain_.signed_distance(p));
  boundary_spacing_ = m.h;

  const int P = params_.polar_cells;
  const int Q = params_.azimuth_cells;
  const double w = (2.0 / P) * (2.0 * kPi / Q);
  for (int p = 0; p < P; ++p) {
    const double mu = -1.0 + (p + 0.5) * 2.0 / P;
    const double s = std::sqrt(1.0 - mu * mu);
    for (int q = 0; q < Q; ++q) {
      const double phi = (q + 0.5) * 2.0 * kPi / Q;
      global_rule_.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), mu);
      global_rule_.weights.push_back(w);
    }
  }
}

AngularRule TransportOperator::directions_at(const Vec3& x) const {
  if (layout_ == Layout::Cartesian) return global_rule_;
  const auto& m = *radial_;
  const Vec3 off = x - m.center;
  const double r = off.norm();
  const Vec3 er = r > 0.0 ? Vec3(off / r) : Vec3(Vec3::UnitZ());
  const Vec3 t1 = perpendicular(er);

  std::vector<double> breaks{-1.0, 0.0, 1.0};
  for (int k = 1; k < params_.mu_panels; ++k) breaks.push_back(-1.0 + 2.0 * k / params_.mu_panels);
  for (double rj : m.r) {
    if (rj <= 0.0 || rj >= r) continue;
    const double q = rj / r;
    breaks.push_back(-std::sqrt((1.0 - q) * (1.0 + q)));
  }
  breaks = quad::merge_breakpoints(std::move(breaks));
  const quad::Rule rule = quad::composite(breaks, params_.mu_order);
  AngularRule out;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double nu = rule.nodes[k];
    const double s = std::sqrt((1.0 - nu) * (1.0 + nu));
    out.directions.push_back(-(nu * er + s * t1));
    out.weights.push_back(2.0 * kPi * rule.weights[k]);
  }
  return out;
}

Stencil TransportOperator::stencil(const Vec3& x) const {
  if (layout_ == Layout::Radial) return radial_->stencil((x - radial_->center).norm());
  return cartesian_->stencil(x);
}

double TransportOperator::interpolate(const Eigen::VectorXd& u, const Vec3& x) const { return stencil(x).apply(u); }

Ray TransportOperator::trace(const Vec3& x, const Vec3& n) const {
  if (layout_ == Layout::Cartesian) return trace_cartesian(x, n);
  const Vec3 off = x - radial_->center;
  const double r = off.norm();
  const double nu = r > 0.0 ? std::clamp(-n.dot(off) / r, -1.0, 1.0) : 1.0;
  return trace_radial(r, nu);
}

Ray TransportOperator::trace_radial(double r, double nu) const {
  const auto& m = *radial_;
  const double R = m.radius;
  if (r > R * (1.0 + 1e-12)) throw std::domain_error("transport: point outside the ball");
  r = std::min(r, R);
  const double rho2 = r * r * (1.0 - nu) * (1.0 + nu);
  const double s = -r * nu + std::sqrt(std::max(0.0, R * R - rho2));

  Ray ray;
  auto& nodes = ray.nodes;
  nodes.push_back({0.0, 0.0, m.stencil(r)});
  const std::size_t N = m.size() - 1;
  for (std::size_t j = 1; j < N; ++j) {
    const double rj2 = m.r[j] * m.r[j];
    if (rj2 <= rho2) continue;
    const double q = std::sqrt(rj2 - rho2);
    for (double t : {-r * nu - q, -r * nu + q}) {
      if (t > 0.0 && t < s) nodes.push_back({t, 0.0, single(static_cast<int>(j))});
    }
  }
  if (nu < 0.0 && r > 0.0 && -r * nu < s) nodes.push_back({-r * nu, 0.0, m.stencil(std::sqrt(rho2))});
  nodes.push_back({s, 0.0, single(static_cast<int>(N))});
  std::stable_sort(nodes.begin(), nodes.end(), [](const RayNode& a, const RayNode& b) { return a.t < b.t; });

  const auto rho_at = [&](double t) { return std::sqrt(std::max(0.0, r * r + 2.0 * r * nu * t + t * t)); };
  // segments near the tangent point span ~sqrt(rho h) in t; split them to the local shell spacing
  std::vector<RayNode> fine;
  fine.reserve(nodes.size());
  fine.push_back(nodes.front());
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double a = nodes[k - 1].t;
    const double b = nodes[k].t;
    const Stencil mid = m.stencil(rho_at(0.5 * (a + b)));
    double h = mid.size == 2 ? m.r[static_cast<std::size_t>(mid.index[1])] - m.r[static_cast<std::size_t>(mid.index[0])]
                             : R - m.r[N - 1];
    if (mid.size == 1 && mid.index[0] == 0) h = m.r[1];
    const int pieces = static_cast<int>(std::ceil((b - a) / h - 1e-9));
    for (int p = 1; p < pieces; ++p) {
      const double t = a + (b - a) * p / pieces;
      fine.push_back({t, 0.0, m.stencil(rho_at(t))});
    }
    fine.push_back(nodes[k]);
  }
  nodes = std::move(fine);

  const quad::Rule& ref = quad::gauss_legendre(params_.alpha_order);
  const auto alpha_at = [&](double t) {
    return alpha_.radial_value(rho_at(t));
  };
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double a = nodes[k - 1].t;
    const double b = nodes[k].t;
    double tau = 0.0;
    if (alpha_.is_constant()) {
      tau = alpha_.lower() * (b - a);
    } else {
      for (std::size_t g = 0; g < ref.size(); ++g) {
        tau += ref.weights[g] * alpha_at(0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[g]);
      }
      tau *= 0.5 * (b - a);
    }
    nodes[k].sigma = nodes[k - 1].sigma + tau / eps_;
    if (nodes[k].sigma > params_.sigma_cut && k + 1 < nodes.size()) {
      nodes.resize(k + 1);
      ray.closed = true;
      break;
    }
  }
  return ray;
}

Ray TransportOperator::trace_cartesian(const Vec3& x, const Vec3& n) const {
  const auto& m = *cartesian_;
  const double s = domain_.ray_exit(x, n).distance;
  const double dt = params_.ray_step * m.h;
  const int K = std::max(1, static_cast<int>(std::ceil(s / dt)));
  const quad::Rule& ref = quad::gauss_legendre(params_.alpha_order);

  Ray ray;
  ray.nodes.reserve(static_cast<std::size_t>(K) + 1);
  ray.nodes.push_back({0.0, 0.0, m.stencil(x)});
  double sigma = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double a = s * (k - 1) / K;
    const double b = s * k / K;
    double tau = 0.0;
    if (alpha_.is_constant()) {
      tau = alpha_.lower() * (b - a);
    } else {
      for (std::size_t g = 0; g < ref.size(); ++g) {
        tau += ref.weights[g] * alpha_.value(x - (0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[g]) * n);
      }
      tau *= 0.5 * (b - a);
    }
    sigma += tau / eps_;
    ray.nodes.push_back({b, sigma, m.stencil(x - b * n)});
    if (sigma > params_.sigma_cut && k < K) {
      ray.closed = true;
      break;
    }
  }
  return ray;
}

double TransportOperator::kernel_row(std::size_t i, const Eigen::VectorXd* u, double* row) const {
  const AngularRule& rule = layout_ == Layout::Radial ? node_rules_[i] : global_rule_;
  double sum = 0.0;
  for (std::size_t d = 0; d < rule.directions.size(); ++d) {
    const Ray ray = trace(points_[i], rule.directions[d]);
    visit_ray(ray, rule.weights[d] / kFourPi, [&](int j, double w) {
      if (row != nullptr) row[j] += w;
      sum += (u != nullptr) ? w * (*u)[j] : w;
    });
  }
  return sum;
}

Eigen::VectorXd TransportOperator::kernel_row(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("transport: row index");
  if (dense_) return matrix_.row(static_cast<Eigen::Index>(i)).transpose();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  (void)kernel_row(i, nullptr, row.data());
  return row;
}

void TransportOperator::assemble() {
  const std::size_t n = size();
  dense_ = layout_ == Layout::Radial || n <= params_.dense_limit;
  if (dense_) matrix_.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  mass_.setZero(static_cast<Eigen::Index>(n));
  leak_.setZero(static_cast<Eigen::Index>(n));
  escape_.assign(n, {});
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long il = 0; il < count; ++il) {
    const auto i = static_cast<std::size_t>(il);
    const AngularRule& rule = layout_ == Layout::Radial ? node_rules_[i] : global_rule_;
    std::vector<double> esc(rule.directions.size());
    double* row = dense_ ? matrix_.row(il).data() : nullptr;
    double sum = 0.0, leak = 0.0;
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      const Ray ray = trace(points_[i], rule.directions[d]);
      esc[d] = escape_of(ray);
      leak += rule.weights[d] / kFourPi * leak_of(ray);
      visit_ray(ray, rule.weights[d] / kFourPi, [&](int j, double w) {
        if (row != nullptr) row[j] += w;
        sum += w;
      });
    }
    escape_[i] = std::move(esc);
    mass_[il] = sum;
    leak_[il] = leak;
  }
}

Eigen::VectorXd TransportOperator::apply_kernel(const Eigen::VectorXd& u) const {
  if (u.size() != static_cast<Eigen::Index>(size())) throw std::invalid_argument("transport: size mismatch");
  if (dense_) return matrix_ * u;
  Eigen::VectorXd out(u.size());
  const long count = static_cast<long>(size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) out[i] = kernel_row(static_cast<std::size_t>(i), &u, nullptr);
  return out;
}

double TransportOperator::apply_function(const Vec3& x, const std::function<double(const Vec3&)>& f,
                                         int azimuths) const {
  if (azimuths < 1) throw std::invalid_argument("transport: azimuths must be positive");
  const AngularRule rule = directions_at(x);
  const int sweeps = layout_ == Layout::Radial ? azimuths : 1;
  const Vec3 off = x - domain_.center();
  const Vec3 axis = off.norm() > 0.0 ? Vec3(off.normalized()) : Vec3(Vec3::UnitZ());
  std::vector<Eigen::AngleAxisd> turns;
  for (int a = 0; a < sweeps; ++a) turns.emplace_back(2.0 * kPi * a / sweeps, axis);
  double sum = 0.0;
  for (std::size_t d = 0; d < rule.directions.size(); ++d) {
    // optical depths on the radial layout depend on (r, nu) only, so one trace serves every azimuth
    const Ray ray = trace(x, rule.directions[d]);
    for (const auto& turn : turns) {
      const Vec3 n = turn * rule.directions[d];
      visit_ray_nodes(ray, rule.weights[d] / (kFourPi * sweeps),
                      [&](std::size_t k, double w) { sum += w * f(x - ray.nodes[k].t * n); });
    }
  }
  return sum;
}

double TransportOperator::source_average(const AngularSource& g, const Vec3& n) const {
  if (g.kind() == AngularSource::Kind::Isotropic || layout_ == Layout::Radial) return g.value(n);
  const int P = params_.polar_cells;
  const int Q = params_.azimuth_cells;
  const double mu = std::clamp(n.z(), -1.0, 1.0);
  double phi = std::atan2(n.y(), n.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  const int p = std::clamp(static_cast<int>(std::floor((mu + 1.0) * P / 2.0)), 0, P - 1);
  const int q = std::clamp(static_cast<int>(std::floor(phi * Q / (2.0 * kPi))), 0, Q - 1);
  constexpr int sub = 8;
  double sum = 0.0;
  for (int a = 0; a < sub; ++a) {
    const double m = -1.0 + (p + (a + 0.5) / sub) * 2.0 / P;
    const double s = std::sqrt(1.0 - m * m);
    for (int b = 0; b < sub; ++b) {
      const double f = (q + (b + 0.5) / sub) * 2.0 * kPi / Q;
      sum += g.value(Vec3(s * std::cos(f), s * std::sin(f), m));
    }
  }
  return sum / (sub * sub);
}

Eigen::VectorXd TransportOperator::source(const AngularSource& g) const {
  if (layout_ == Layout::Radial && g.kind() != AngularSource::Kind::Isotropic) {
    throw std::invalid_argument("transport: the radial layout needs an isotropic source");
  }
  std::vector<double> gbar;
  if (layout_ == Layout::Cartesian) {
    for (const Vec3& n : global_rule_.directions) gbar.push_back(source_average(g, n));
  }
  Eigen::VectorXd S(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    const AngularRule& rule = layout_ == Layout::Radial ? node_rules_[i] : global_rule_;
    double sum = 0.0;
    for (std::size_t d = 0; d < rule.weights.size(); ++d) {
      const double gd = layout_ == Layout::Radial ? g.level() : gbar[d];
      sum += rule.weights[d] * gd * escape_[i][d];
    }
    S[static_cast<Eigen::Index>(i)] = sum;
  }
  return S;
}

double TransportOperator::ray_integral(const Ray& ray, const Eigen::VectorXd& u) const {
  double sum = 0.0;
  visit_ray(ray, 1.0 / kFourPi, [&](int j, double w) { sum += w * u[j]; });
  return sum;
}

std::shared_ptr<const TransportOperator> make_operator(const ConvexDomain& domain, const AbsorptionField& alpha,
                                                       double eps, const TransportParams& params,
                                                       const AngularSource* g) {
  TransportParams p = params;
  if (p.layout == Layout::Auto && g != nullptr && g->kind() != AngularSource::Kind::Isotropic) {
    p.layout = Layout::Cartesian;
  }
  return std::make_shared<const TransportOperator>(domain, alpha, eps, p);
}

DomainField solve_ueps(std::shared_ptr<const TransportOperator> op, Eigen::VectorXd source, const SolveParams& params) {
  if (!op) throw std::invalid_argument("transport: null operator");
  if (source.size() != static_cast<Eigen::Index>(op->size())) throw std::invalid_argument("transport: source size");
  DomainField field;
  field.op = std::move(op);
  field.source = std::move(source);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(field.source.size());
  SolveReport& rep = field.report;
  // contraction from the geometric mean of update ratios over a window, since
  // single-step sup-norm ratios are dominated by roundoff near convergence
  constexpr int kWindow = 32;
  std::deque<double> history;
  double scale = 0.0;
  for (int k = 1; k <= params.max_iters; ++k) {
    Eigen::VectorXd next = field.op->apply_kernel(u) + field.source;
    const Eigen::VectorXd delta = next - u;
    const double upd = delta.cwiseAbs().maxCoeff();
    scale = std::max(scale, next.cwiseAbs().maxCoeff());
    rep.iterations = k;
    rep.update = upd;
    u = std::move(next);
    if (scale == 0.0) {
      rep.converged = true;
      break;
    }
    if (delta.minCoeff() < -1e-12 * scale) {
      throw std::runtime_error("transport: Picard iterates decreased at step " + std::to_string(k) +
                               " (negative weight or source)");
    }
    history.push_back(upd);
    if (static_cast<int>(history.size()) > kWindow + 1) history.pop_front();
    if (history.front() <= 0.0 || history.size() < 2) continue;
    const int span = static_cast<int>(history.size()) - 1;
    rep.contraction = std::pow(upd / history.front(), 1.0 / span);
    const bool noise = upd <= 1e3 * std::numeric_limits<double>::epsilon() * scale;
    if (rep.contraction >= 1.0 && span == kWindow && !noise) {
      throw std::runtime_error("transport: contraction estimate " + std::to_string(rep.contraction) +
                               " >= 1 at step " + std::to_string(k));
    }
    rep.error_estimate = rep.contraction < 1.0 ? rep.contraction / (1.0 - rep.contraction) * upd
                                               : std::numeric_limits<double>::infinity();
    if (upd <= params.tol * scale && rep.error_estimate <= params.tol * scale) {
      rep.converged = true;
      break;
    }
  }
  if (u.size() > 0 && u.minCoeff() < -1e-10 * std::max(scale, 1e-300)) {
    throw std::runtime_error("transport: negative energy density " + std::to_string(u.minCoeff()));
  }
  rep.residual = (u - field.op->apply_kernel(u) - field.source).cwiseAbs().maxCoeff();
  field.u = std::move(u);
  return field;
}

DomainField solve_ueps(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g, double eps,
                       const TransportParams& params, const SolveParams& solve) {
  auto op = make_operator(domain, alpha, eps, params, &g);
  Eigen::VectorXd S = op->source(g);
  return solve_ueps(std::move(op), std::move(S), solve);
}

double reconstruct_intensity(const DomainField& field, const AngularSource& g, const Vec3& x, const Vec3& n) {
  const Ray ray = field.op->trace(x, n);
  return field.op->source_average(g, n) * escape_of(ray) + field.op->ray_integral(ray, field.u);
}

std::vector<double> flux_divergence_residual(const DomainField& field, const AngularSource& g,
                                             std::span<const Vec3> probes) {
  std::vector<double> out;
  out.reserve(probes.size());
  for (const Vec3& x : probes) {
    const AngularRule rule = field.op->directions_at(x);
    double total = 0.0;
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      total += rule.weights[d] * reconstruct_intensity(field, g, x, rule.directions[d]);
    }
    const double u = field(x);
    out.push_back(std::abs(u - total) / std::max(u, 1.0));
  }
  return out;
}

LayerMatch boundary_layer_match(const DomainField& field, const milne::HalfLineProfile& profile,
                                const BoundarySample& p) {
  const auto& y = profile.grid.y;
  const auto u_bar = [&](double s) {
    if (s >= y.back()) return profile.u[static_cast<Eigen::Index>(y.size() - 1)];
    const auto it = std::upper_bound(y.begin(), y.end(), s);
    const auto j = static_cast<std::size_t>(it - y.begin());
    const double f = (s - y[j - 1]) / (y[j] - y[j - 1]);
    return (1.0 - f) * profile.u[static_cast<Eigen::Index>(j - 1)] + f * profile.u[static_cast<Eigen::Index>(j)];
  };
  const double eps = field.eps();
  const double alpha_p = field.op->alpha().value(p.point);
  const double reach = std::sqrt(eps);
  LayerMatch out;
  constexpr int samples = 96;
  for (int k = 1; k <= samples; ++k) {
    const double f = static_cast<double>(k) / samples;
    const double t = reach * f * f;
    const double diff = std::abs(field(p.point - t * p.normal) - u_bar(alpha_p * t / eps));
    if (diff > out.sup_difference) {
      out.sup_difference = diff;
      out.at_depth = t;
    }
  }
  return out;
}

}  // namespace raddiff::transport
