#include "raddiff/milne.hpp"

#include "raddiff/quadrature.hpp"
#include "raddiff/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace raddiff::milne {

namespace {

// Tails T_k(x) = int_x^inf s^k K(s) ds for x >= 0, k = 0, 1.
struct Tails {
  double t0;
  double t1;
};

Tails tails(double x) {
  if (x == 0.0) return {specfun::kHalfMass, specfun::kHalfFirstMoment};
  // tail_from and first_moment_tail sharing one E2 evaluation
  const double e2 = specfun::exp_integral_e2(x);
  return {0.5 * e2, 0.25 * (std::exp(-x) + x * e2)};
}

// Moments M0, M1 of K over [a, b] from the tails at |a| and |b|.
std::pair<double, double> interval_moments(double a, double b, const Tails& ta, const Tails& tb) {
  const Tails t0 = tails(0.0);
  if (a >= 0.0) return {ta.t0 - tb.t0, ta.t1 - tb.t1};
  if (b <= 0.0) return {tb.t0 - ta.t0, -(tb.t1 - ta.t1)};
  return {(t0.t0 - ta.t0) + (t0.t0 - tb.t0), -(t0.t1 - ta.t1) + (t0.t1 - tb.t1)};
}

// Breakpoints on [0, length]: geometric from `smallest`, then panels of at most max_panel.
std::vector<double> graded_breakpoints(double length, double smallest, double max_panel) {
  std::vector<double> b{0.0};
  double edge = smallest;
  while (edge < max_panel && edge < length) {
    b.push_back(edge);
    edge *= 2.0;
  }
  double last = b.back();
  while (last + max_panel < length) {
    last += max_panel;
    b.push_back(last);
  }
  b.push_back(length);
  return quad::merge_breakpoints(b);
}

}  // namespace

HalfLineGrid make_grid(const GridParams& params) {
  if (!(params.y_max > 0.0) || !(params.h0 > 0.0) || !(params.ratio >= 1.0) || !(params.h_max >= params.h0)) {
    throw std::invalid_argument("milne grid: need y_max > 0, h0 > 0, ratio >= 1, h_max >= h0");
  }
  HalfLineGrid grid;
  grid.y.push_back(0.0);
  double h = params.h0;
  while (grid.y.back() + h < params.y_max) {
    grid.y.push_back(grid.y.back() + h);
    h = std::min(h * params.ratio, params.h_max);
  }
  // absorb a short last step into the previous one
  if (params.y_max - grid.y.back() < 0.5 * h && grid.y.size() > 1) grid.y.pop_back();
  grid.y.push_back(params.y_max);
  validate(grid);
  return grid;
}

HalfLineGrid refine(const HalfLineGrid& grid) {
  HalfLineGrid fine;
  fine.y.reserve(2 * grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    fine.y.push_back(grid.y[i]);
    fine.y.push_back(0.5 * (grid.y[i] + grid.y[i + 1]));
  }
  fine.y.push_back(grid.y.back());
  return fine;
}

void validate(const HalfLineGrid& grid) {
  if (grid.size() < 2 || grid.y.front() != 0.0) throw std::invalid_argument("milne grid: must start at 0 with >= 2 nodes");
  double hmax = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid.y[i] - grid.y[i - 1];
    if (!(h > 0.0)) throw std::invalid_argument("milne grid: nodes must be strictly increasing");
    hmax = std::max(hmax, h);
  }
  if (grid.y[1] > 1e-3) throw std::invalid_argument("milne grid: first spacing exceeds 1e-3");
  if (hmax > 0.25) throw std::invalid_argument("milne grid: spacing exceeds 0.25, kernel scale unresolved");
}

MilneOperator::MilneOperator(HalfLineGrid grid) : grid_(std::move(grid)) {
  validate(grid_);
  const std::size_t n = grid_.size();
  const auto& y = grid_.y;
  const double ymax = grid_.y_max();
  w_.setZero(n, n);
  mass_.resize(n);
  leak_.resize(n);
#pragma omp parallel
  {
    std::vector<Tails> t(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t j = 0; j < n; ++j) t[j] = tails(std::abs(y[j] - y[i]));
      for (std::size_t j = 1; j < n; ++j) {
        const double a = y[j - 1] - y[i];
        const double b = y[j] - y[i];
        const double h = b - a;
        const auto [m0, m1] = interval_moments(a, b, t[j - 1], t[j]);
        w_(i, j) += std::max(0.0, (m1 - a * m0) / h);
        w_(i, j - 1) += std::max(0.0, (b * m0 - m1) / h);
      }
      // constant closure beyond y_max
      w_(i, n - 1) += (i + 1 == n) ? specfun::kHalfMass : specfun::tail_from(ymax - y[i]);
      mass_[i] = (i == 0) ? specfun::kHalfMass : specfun::head_from(y[i]);
      leak_[i] = (i == 0) ? specfun::kHalfMass : specfun::tail_from(y[i]);
      w_(i, i) += mass_[i] - w_.row(i).sum();
    }
  }
  lu_.compute(matrix());

  moment_rule_ = quad::composite(graded_breakpoints(40.0, 1e-5, 1.0), 16);
  moment_weights_.setZero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < moment_rule_.size(); ++k) {
    const double t = moment_rule_.nodes[k];
    const double wk = moment_rule_.weights[k] * t;
    Tails prev = tails(y[0] + t);
    for (std::size_t j = 1; j < n; ++j) {
      const Tails next = tails(y[j] + t);
      const double a = y[j - 1] + t;
      const double b = y[j] + t;
      const double m0 = prev.t0 - next.t0;
      const double m1 = prev.t1 - next.t1;
      const double h = b - a;
      moment_weights_[static_cast<Eigen::Index>(j)] += wk * std::max(0.0, (m1 - a * m0) / h);
      moment_weights_[static_cast<Eigen::Index>(j - 1)] += wk * std::max(0.0, (b * m0 - m1) / h);
      prev = next;
    }
    moment_weights_[static_cast<Eigen::Index>(n - 1)] += wk * prev.t0;
  }
}

Eigen::MatrixXd MilneOperator::matrix() const {
  // diagonal as (1 - C_i) + sum_{j != i} W_ij, which keeps the row sums exact
  Eigen::MatrixXd a = -w_;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    a(i, i) = leak_[static_cast<std::size_t>(i)] + (w_.row(i).sum() - w_(i, i));
  }
  return a;
}

double MilneOperator::reflected_first_moment(const Eigen::VectorXd& u) const { return moment_weights_.dot(u); }

Eigen::VectorXd MilneOperator::apply(const Eigen::VectorXd& u) const { return u - w_ * u; }

Eigen::VectorXd MilneOperator::solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

RowAudit MilneOperator::audit() const {
  RowAudit audit;
  audit.max_offdiagonal = -std::numeric_limits<double>::infinity();
  audit.min_diagonal = std::numeric_limits<double>::infinity();
  audit.min_row_sum = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd a = matrix();
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) audit.max_offdiagonal = std::max(audit.max_offdiagonal, a(i, j));
    }
    audit.min_diagonal = std::min(audit.min_diagonal, a(i, i));
    const double leak = leak_[static_cast<std::size_t>(i)];
    audit.min_row_sum = std::min(audit.min_row_sum, leak);
    audit.max_row_defect = std::max(audit.max_row_defect, std::abs(a.row(i).sum() - leak));
  }
  return audit;
}

double MilneOperator::reflected_convolution(const Eigen::VectorXd& u, double t) const {
  if (!(t > 0.0)) throw std::domain_error("reflected_convolution: t must be positive");
  const auto& y = grid_.y;
  const std::size_t n = y.size();
  double sum = 0.0;
  Tails prev = tails(y[0] + t);
  for (std::size_t j = 1; j < n; ++j) {
    const Tails next = tails(y[j] + t);
    const double a = y[j - 1] + t;
    const double b = y[j] + t;
    const double m0 = prev.t0 - next.t0;
    const double m1 = prev.t1 - next.t1;
    const double h = b - a;
    sum += u[j] * std::max(0.0, (m1 - a * m0) / h) + u[j - 1] * std::max(0.0, (b * m0 - m1) / h);
    prev = next;
  }
  return sum + u[n - 1] * prev.t0;
}

MilneOperator assemble_operator(const HalfLineGrid& grid) { return MilneOperator(grid); }

HalfLineProfile solve_milne(const MilneOperator& op, std::span<const double> G, const SolveOptions& options) {
  const std::size_t n = op.size();
  if (G.size() != n) throw std::invalid_argument("solve_milne: source length does not match the grid");
  const Eigen::Map<const Eigen::VectorXd> g(G.data(), static_cast<Eigen::Index>(n));
  if (g.minCoeff() < 0.0) throw std::invalid_argument("solve_milne: source must be nonnegative");

  HalfLineProfile profile;
  profile.grid = op.grid();
  profile.u = op.solve(g);
  profile.residual = (op.apply(profile.u) - g).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, profile.u.cwiseAbs().maxCoeff());
  if (profile.u.minCoeff() < -1e-10 * scale) {
    std::ostringstream msg;
    msg << "solve_milne: discretization failure, min(u) = " << profile.u.minCoeff();
    throw std::runtime_error(msg.str());
  }

  if (options.picard_steps > 0) {
    PicardReport& rep = profile.picard;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    double prev_update = 0.0;
    for (int k = 0; k < options.picard_steps; ++k) {
      Eigen::VectorXd next = op.weights() * u + g;
      const Eigen::VectorXd diff = next - u;
      if (diff.minCoeff() < -1e-12 * scale) rep.monotone = false;
      const double update = diff.cwiseAbs().maxCoeff();
      u.swap(next);
      rep.iterations = k + 1;
      if (prev_update > 0.0) rep.contraction = update / prev_update;
      prev_update = update;
      if (k > 0 && rep.contraction < 1.0) {
        rep.bound = update * rep.contraction / (1.0 - rep.contraction);
        if (rep.bound <= 0.1 * options.picard_tol * scale) {
          rep.converged = true;
          break;
        }
      } else if (update == 0.0) {
        rep.converged = true;
        break;
      }
    }
    const double half = 0.5 * op.grid().y_max();
    for (std::size_t i = 0; i < n && op.grid().y[i] <= half; ++i) {
      rep.gap = std::max(rep.gap, std::abs(u[i] - profile.u[i]));
    }
    if (!rep.monotone) throw std::runtime_error("solve_milne: Picard sequence not monotone, quadrature failure");
    if (rep.converged && rep.gap > options.picard_tol * scale) {
      std::ostringstream msg;
      msg << "solve_milne: Picard and direct solve disagree by " << rep.gap;
      throw std::runtime_error(msg.str());
    }
  }
  return profile;
}

namespace {

struct DecayFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = 0.0;
  double sign = 1.0;
  bool ok = false;
};

DecayFit fit_decay(const HalfLineProfile& p, double u_inf, double lo, double hi) {
  const double scale = std::max(1.0, std::abs(u_inf));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, sd = 0.0;
  int count = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double y = p.grid.y[i];
    if (y < lo || y > hi) continue;
    peak = std::max(peak, std::abs(p.u[i] - u_inf));
  }
  DecayFit fit;
  if (peak <= 1e-12 * scale) return fit;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double y = p.grid.y[i];
    if (y < lo || y > hi) continue;
    const double d = p.u[i] - u_inf;
    if (std::abs(d) <= 1e-300) continue;
    const double l = std::log(std::abs(d));
    sx += y;
    sy += l;
    sxx += y * y;
    sxy += y * l;
    sd += d;
    ++count;
  }
  if (count < 2) return fit;
  const double denom = count * sxx - sx * sx;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  fit.sign = sd >= 0.0 ? 1.0 : -1.0;
  fit.ok = true;
  return fit;
}

}  // namespace

LimitEstimate milne_limit(const MilneOperator& op, const HalfLineProfile& profile,
                          const std::function<double(double)>& G) {
  const auto& y = profile.grid.y;
  const double ymax = profile.grid.y_max();
  const double lo = std::min(5.0, 0.125 * ymax);
  const double hi = std::min(20.0, 0.5 * ymax);

  // Trapezoid average over the plateau window.
  const double start = 0.8 * ymax;
  const auto plateau_avg = [&](const std::function<double(double, double)>& corr) {
    double area = 0.0, len = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) {
      if (y[i - 1] < start) continue;
      const double h = y[i] - y[i - 1];
      area += 0.5 * h * (corr(y[i - 1], profile.u[i - 1]) + corr(y[i], profile.u[i]));
      len += h;
    }
    return area / len;
  };

  LimitEstimate est;
  double u_inf = plateau_avg([](double, double v) { return v; });
  DecayFit fit;
  for (int pass = 0; pass < 2; ++pass) {
    fit = fit_decay(profile, u_inf, lo, hi);
    if (!fit.ok || !(fit.slope < 0.0)) break;
    u_inf = plateau_avg([&](double yy, double v) { return v - fit.sign * std::exp(fit.intercept + fit.slope * yy); });
  }
  est.u_inf = u_inf;
  est.decay_rate = fit_decay(profile, u_inf, lo, hi).slope;

  // 3 m1(W): W = G on the positive axis, minus the reflected convolution on
  // the negative axis.
  const quad::Rule& rule = op.moment_rule();
  double pos = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) pos += rule.weights[k] * rule.nodes[k] * G(rule.nodes[k]);
  est.u_inf_moment = 3.0 * (pos + op.reflected_first_moment(profile.u));
  const double denom = std::max(std::abs(est.u_inf), std::abs(est.u_inf_moment));
  est.relative_gap = denom > 0.0 ? std::abs(est.u_inf - est.u_inf_moment) / denom : 0.0;
  est.flagged = est.relative_gap > 0.01;
  return est;
}

std::vector<BoundaryValue> boundary_temperature_map(const ConvexDomain& domain, const AngularSource& g,
                                                    const AbsorptionField& alpha, int samples,
                                                    const MilneOperator& op, const HemisphereQuadrature& q) {
  (void)alpha;
  if (samples < 1) throw std::invalid_argument("boundary_temperature_map: need at least one sample");
  const auto points = domain.fibonacci_samples(samples);
  std::vector<BoundaryValue> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    try {
      const PlanarSource G(g, points[k].normal, q);
      const std::vector<double> gs = G.sample(op.grid().y);
      const HalfLineProfile profile = solve_milne(op, gs);
      const LimitEstimate lim = milne_limit(op, profile, [&G](double x) { return G(x); });
      out[k] = {points[k], lim.u_inf, lim.u_inf_moment, lim.decay_rate, lim.flagged};
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "boundary_temperature_map: sample " << k << " at (" << points[k].point.x() << ", "
          << points[k].point.y() << ", " << points[k].point.z() << "): " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  return out;
}

double lipschitz_quotient(const std::vector<BoundaryValue>& map) {
  double q = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    for (std::size_t j = i + 1; j < map.size(); ++j) {
      const double d = (map[i].sample.point - map[j].sample.point).norm();
      if (d > 0.0) q = std::max(q, std::abs(map[i].u_inf - map[j].u_inf) / d);
    }
  }
  return q;
}

double temperature_from_u(double u, double sigma) {
  if (u < 0.0) throw std::domain_error("temperature_from_u: u must be nonnegative");
  if (!(sigma > 0.0)) throw std::domain_error("temperature_from_u: sigma must be positive");
  return std::pow(u / (4.0 * std::numbers::pi * sigma), 0.25);
}

}  // namespace raddiff::milne
