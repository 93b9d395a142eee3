#include "raddiff/verify.hpp"
#include "raddiff/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace raddiff::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The pieces of L(Phi) at one probe; Phi is linear in them.
struct ProbeData {
  Vec3 x;
  double eps = 0.0;
  double depth = 0.0;
  double L_one = 0.0;
  double L_part = 0.0;  // quadratic (with C1) or exponential part
  double L_psi = 0.0;
};

bool radial_about_origin(const transport::TransportOperator& op) {
  return op.layout() == transport::Layout::Radial && op.domain().center().norm() == 0.0;
}

double part_value(const SupersolutionParams& p, const Vec3& x) {
  if (p.variant == Variant::Constant) return p.C1 - x.squaredNorm();
  return std::exp(p.lambda * p.D) - std::exp(p.lambda * (x.x() - p.x1_origin));
}

double apply_L(const transport::TransportOperator& op, const Vec3& x, const std::function<double(const Vec3&)>& f,
               bool radial) {
  return f(x) - op.apply_function(x, f, radial ? 1 : 16);
}

double depth_of(const ConvexDomain& domain, const Vec3& x) { return std::max(0.0, domain.signed_distance(x)); }

std::vector<ProbeData> probe_parts(const SupersolutionParams& p, const transport::TransportOperator& op,
                                   std::span<const Vec3> probes, bool with_part) {
  const ConvexDomain& domain = op.domain();
  const double eps = op.eps();
  const bool radial = radial_about_origin(op);
  std::vector<ProbeData> out(probes.size());
  const long count = static_cast<long>(probes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < count; ++k) {
    ProbeData& q = out[static_cast<std::size_t>(k)];
    q.x = probes[static_cast<std::size_t>(k)];
    q.eps = eps;
    q.depth = depth_of(domain, q.x);
    q.L_one = apply_L(op, q.x, [](const Vec3&) { return 1.0; }, radial);
    q.L_psi = apply_L(op, q.x, [&](const Vec3& y) { return psi(p, eps, depth_of(domain, y)); }, radial);
    if (with_part) {
      const bool part_radial = radial && p.variant == Variant::Constant;
      q.L_part = apply_L(op, q.x, [&](const Vec3& y) { return part_value(p, y); }, part_radial);
    }
  }
  return out;
}

// L(Phi) / |g|_1 from the pieces.
double L_phi_unit(const SupersolutionParams& p, const ProbeData& q) {
  if (p.variant == Variant::Constant) return p.C3 * q.L_part + p.C2 * q.L_psi;
  return p.C3 * (q.L_part + p.C1 * q.L_one + p.C2 * q.L_psi);
}

double target_unit(const SupersolutionParams& p, const ProbeData& q) {
  const double c0 = p.variant == Variant::Variable ? p.c0 : 1.0;
  return std::exp(-c0 * q.depth / q.eps);
}

// The windowed operators, or the smallest eps when none is inside.
std::vector<const transport::TransportOperator*> windowed(
    const SupersolutionParams& p, std::span<const std::shared_ptr<const transport::TransportOperator>> ops) {
  if (ops.empty()) throw std::invalid_argument("verify: no operators to calibrate on");
  std::vector<const transport::TransportOperator*> out;
  const transport::TransportOperator* smallest = ops.front().get();
  for (const auto& op : ops) {
    if (p.within_window(op->eps())) out.push_back(op.get());
    if (op->eps() < smallest->eps()) smallest = op.get();
  }
  if (out.empty()) out.push_back(smallest);
  return out;
}

SupersolutionParams fit(SupersolutionParams p, const std::vector<ProbeData>& data) {
  const double half = 0.5 * p.mu * p.R;
  const double full = p.mu * p.R;
  if (p.variant == Variant::Constant) {
    double C0 = kInf, c = 0.0;
    for (const auto& q : data) {
      if (q.depth <= half) C0 = std::min(C0, q.L_psi * std::exp(q.depth / q.eps));
      if (q.depth > half && q.depth < full) c = std::max(c, std::max(0.0, -q.L_psi) / (q.eps * q.eps));
    }
    if (!(C0 > 0.0) || !std::isfinite(C0)) {
      throw std::runtime_error("verify: L(psi) is not positive near the boundary for these mu, gamma");
    }
    p.C2 = 1.0 / C0;
    p.C3 = (C0 + c) / (2.0 * C0);
    return p;
  }

  double A1 = 0.0, A2 = kInf, A3 = kInf, A4 = 0.0, eps_max = 0.0;
  for (const auto& q : data) {
    const double thr = 2.0 * q.eps * std::log(1.0 / q.eps) / p.c0;
    eps_max = std::max(eps_max, q.eps);
    if (q.depth < thr) {
      A1 = std::max(A1, std::max(0.0, -q.L_part) / (q.eps * std::exp(-p.c0 * q.depth / (2.0 * q.eps))));
    } else {
      A2 = std::min(A2, q.L_part / (q.eps * q.eps));
    }
    const double s = p.c0 * q.depth / q.eps;
    if (q.depth <= half) A3 = std::min(A3, q.L_psi * (1.0 + s * s) * (1.0 + s * s));
    if (q.depth > half && q.depth < full) A4 = std::max(A4, std::max(0.0, -q.L_psi) / (q.eps * q.eps));
  }
  if (!(A2 > 0.0) || !std::isfinite(A2)) {
    throw std::runtime_error("verify: L(e^{lambda D} - e^{lambda x1}) is not positive in the interior; raise lambda");
  }
  if (!(A3 > 0.0) || !std::isfinite(A3)) {
    throw std::runtime_error("verify: L(psi) is not positive near the boundary for these mu, gamma");
  }
  p.C2 = A4 > 0.0 ? A2 / (2.0 * A4) : 6.0 * A2 / A3;
  // M0: beyond it the psi part absorbs the negative boundary term of the exponential part
  double M0 = 0.0;
  for (double m = 200.0; m >= 0.0; m -= 0.05) {
    if (A1 * eps_max * std::exp(-p.c0 * m / 2.0) >
        p.C2 * A3 / (2.0 * std::pow(1.0 + p.c0 * p.c0 * m * m, 2))) {
      M0 = m + 0.05;
      break;
    }
  }
  const double nu = specfun::tail_from(std::max(p.c1 * M0, 1e-300));
  p.C1 = std::max(1.01 * A1 * p.c1 / (p.c0 * nu), 1e-6);
  p.C3 = 1.0 / std::min(A2 / 2.0, p.C2 * A3 / 12.0);
  return p;
}

double worst_relative(const SupersolutionParams& p, const std::vector<ProbeData>& data) {
  double worst = kInf;
  for (const auto& q : data) {
    const double t = target_unit(p, q);
    worst = std::min(worst, (L_phi_unit(p, q) - t) / t);
  }
  return worst;
}

}  // namespace

double SupersolutionParams::uniform_bound() const {
  if (variant == Variant::Constant) return g_norm1 * (2.0 * C3 * C1 + C2);
  return g_norm1 * C3 * (std::exp(lambda * D) + C1 + C2);
}

bool SupersolutionParams::within_window(double eps) const {
  if (!(eps > 0.0) || eps >= 1.0) return false;
  const double c = variant == Variant::Variable ? c0 : 1.0;
  return eps < 0.5 * R * mu * mu * mu && 0.5 * mu * R > 2.0 * eps * std::log(1.0 / eps) / c;
}

void SupersolutionParams::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("supersolution: mu must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma < 1.0 / 3.0)) throw std::invalid_argument("supersolution: gamma must lie in [0, 1/3)");
  if (!(C1 >= 0.0) || !(C2 > 0.0) || !(C3 > 0.0)) throw std::invalid_argument("supersolution: constants must be positive");
  if (!(lambda > 0.0) || !(R > 0.0) || !(c0 > 0.0) || !(c1 >= c0)) {
    throw std::invalid_argument("supersolution: lambda, R, c0 must be positive and c1 >= c0");
  }
}

SupersolutionParams recipe(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g,
                           Variant variant, double mu, double gamma_fraction, double lambda) {
  if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
    throw std::invalid_argument("supersolution: gamma fraction must lie in (0, 1)");
  }
  SupersolutionParams p;
  p.variant = variant;
  p.mu = mu;
  p.lambda = lambda;
  p.R = domain.min_curvature_radius();
  p.D = domain.diameter();
  p.c0 = alpha.lower();
  p.c1 = alpha.upper();
  p.g_norm1 = g.norm1();
  p.x1_origin = domain.box_min().x();
  const double M = 1.0 / (mu * mu);
  if (variant == Variant::Constant) {
    p.gamma = gamma_fraction * 0.5 * specfun::tail_from(M);
    const double r = domain.max_norm();
    p.C1 = 2.0 * r * r + 2.0 * p.D * p.D + 4.0 * p.D + 4.0;
  } else {
    p.gamma = gamma_fraction * 0.5 * specfun::tail_from(p.c1 * M) * p.c0 / p.c1;
    p.C1 = 0.0;
  }
  p.gamma = std::min(p.gamma, gamma_fraction / 3.0);
  return p;
}

double psi(const SupersolutionParams& p, double eps, double depth) {
  const double c = p.variant == Variant::Variable ? p.c0 : 1.0;
  const double s = c * std::max(depth, 0.0) / eps;
  const double t = c * p.mu * p.R / eps;
  return std::min(1.0 - p.gamma / (1.0 + s * s), 1.0 - p.gamma / (1.0 + t * t));
}

double phi_eps(const Vec3& x, const SupersolutionParams& p, double eps, const ConvexDomain& domain) {
  const double w = psi(p, eps, depth_of(domain, x));
  if (p.variant == Variant::Constant) return p.g_norm1 * (p.C3 * part_value(p, x) + p.C2 * w);
  return p.g_norm1 * p.C3 * (part_value(p, x) + p.C1 + p.C2 * w);
}

MarginReport check_supersolution(const SupersolutionParams& p, const transport::TransportOperator& op,
                                 std::span<const Vec3> probes) {
  p.validate();
  const ConvexDomain& domain = op.domain();
  const double eps = op.eps();
  const bool radial = radial_about_origin(op) && p.variant == Variant::Constant;
  MarginReport rep;
  rep.eps = eps;
  rep.within_window = p.within_window(eps);
  rep.probes.resize(probes.size());
  const double c0 = p.variant == Variant::Variable ? p.c0 : 1.0;
  const long count = static_cast<long>(probes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < count; ++k) {
    ProbeMargin& m = rep.probes[static_cast<std::size_t>(k)];
    m.x = probes[static_cast<std::size_t>(k)];
    m.depth = depth_of(domain, m.x);
    m.L_phi = apply_L(op, m.x, [&](const Vec3& y) { return phi_eps(y, p, eps, domain); }, radial);
    m.target = p.g_norm1 * std::exp(-c0 * m.depth / eps);
    m.margin = m.L_phi - m.target;
  }
  rep.min_margin = kInf;
  rep.min_relative = kInf;
  for (std::size_t k = 0; k < rep.probes.size(); ++k) {
    const auto& m = rep.probes[k];
    if (m.margin < rep.min_margin) {
      rep.min_margin = m.margin;
      rep.argmin = k;
    }
    if (m.target > 0.0) rep.min_relative = std::min(rep.min_relative, m.margin / m.target);
  }
  return rep;
}

MarginReport check_supersolution(const SupersolutionParams& p, double eps, const ConvexDomain& domain,
                                 const AbsorptionField& alpha, std::span<const Vec3> probes) {
  const auto op = transport::make_operator(domain, alpha, eps);
  return check_supersolution(p, *op, probes);
}

std::vector<Vec3> layer_probes(const ConvexDomain& domain, double eps, int directions) {
  const double reach = 0.9 * domain.semi_axes().minCoeff();
  std::vector<double> depths;
  for (double f : {0.05, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    if (f * eps < reach) depths.push_back(f * eps);
  }
  for (int k = 1; k <= 9; ++k) depths.push_back(reach * k / 9.0);
  std::vector<Vec3> out;
  for (const auto& s : domain.fibonacci_samples(directions)) {
    for (double d : depths) {
      const Vec3 x = s.point - d * s.normal;
      if (domain.signed_distance(x) > 0.0) out.push_back(x);
    }
  }
  out.push_back(domain.center());
  return out;
}

SupersolutionParams calibrate(SupersolutionParams p,
                              std::span<const std::shared_ptr<const transport::TransportOperator>> ops) {
  std::vector<ProbeData> data;
  for (const auto* op : windowed(p, ops)) {
    const auto probes = layer_probes(op->domain(), op->eps());
    const auto part = probe_parts(p, *op, probes, true);
    data.insert(data.end(), part.begin(), part.end());
  }
  p = fit(p, data);
  p.validate();
  return p;
}

SupersolutionParams search(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g,
                           Variant variant, std::span<const std::shared_ptr<const transport::TransportOperator>> ops) {
  const std::vector<double> lambdas = variant == Variant::Constant ? std::vector<double>{1.0}
                                                                   : std::vector<double>{1.0, 2.0};
  SupersolutionParams best;
  double best_score = -kInf;
  bool found = false;
  for (double mu : {0.75, 0.85, 0.95}) {
    for (double lambda : lambdas) {
      // the quadratic or exponential part and L(1) do not depend on gamma
      SupersolutionParams base = recipe(domain, alpha, g, variant, mu, 0.9, lambda);
      const auto ops_in = windowed(base, ops);
      std::vector<std::vector<Vec3>> probes;
      std::vector<std::vector<ProbeData>> shared;
      for (const auto* op : ops_in) {
        probes.push_back(layer_probes(op->domain(), op->eps()));
        shared.push_back(probe_parts(base, *op, probes.back(), true));
      }
      for (double frac : {0.5, 0.9}) {
        SupersolutionParams p = recipe(domain, alpha, g, variant, mu, frac, lambda);
        std::vector<ProbeData> data;
        for (std::size_t k = 0; k < ops_in.size(); ++k) {
          auto part = probe_parts(p, *ops_in[k], probes[k], false);
          for (std::size_t j = 0; j < part.size(); ++j) part[j].L_part = shared[k][j].L_part;
          data.insert(data.end(), part.begin(), part.end());
        }
        try {
          p = fit(p, data);
          p.validate();
        } catch (const std::runtime_error&) {
          continue;
        }
        const double score = worst_relative(p, data);
        if (!found || score > best_score) {
          best = p;
          best_score = score;
          found = true;
        }
      }
    }
  }
  if (!found) throw std::runtime_error("verify: no supersolution constants found on the search grid");
  return best;
}

PositivityReport positivity_harness(const milne::MilneOperator& op, int trials, std::uint64_t seed, bool flip_sign) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PositivityReport rep;
  rep.min_value = kInf;
  const auto n = static_cast<Eigen::Index>(op.size());
  double worst = kInf;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd G(n);
    for (Eigen::Index i = 0; i < n; ++i) G[i] = u(rng) < 0.3 ? 0.0 : u(rng);
    if (flip_sign) G = -G;
    const Eigen::VectorXd x = op.solve(G);
    const double lo = x.minCoeff();
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    ++rep.trials;
    rep.min_value = std::min(rep.min_value, lo);
    if (lo < -1e-10 * scale) {
      ++rep.failures;
      if (lo < worst) {
        worst = lo;
        std::ostringstream os;
        os << "trial " << t << " (seed " << seed << "): min u = " << lo << ", source sum " << G.sum();
        rep.worst = os.str();
      }
    }
  }
  return rep;
}

PositivityReport positivity_harness(const std::shared_ptr<const transport::TransportOperator>& op, int trials,
                                    std::uint64_t seed, bool flip_sign) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PositivityReport rep;
  rep.min_value = kInf;
  const auto n = static_cast<Eigen::Index>(op->size());
  double worst = kInf;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd S(n);
    for (Eigen::Index i = 0; i < n; ++i) S[i] = u(rng) < 0.3 ? 0.0 : u(rng);
    if (flip_sign) S = -S;
    ++rep.trials;
    std::ostringstream os;
    os << "trial " << t << " (seed " << seed << ", eps " << op->eps() << "): ";
    try {
      const auto f = transport::solve_ueps(op, S);
      const double lo = f.u.minCoeff();
      const double scale = std::max(1.0, f.u.cwiseAbs().maxCoeff());
      rep.min_value = std::min(rep.min_value, lo);
      if (lo < -1e-10 * scale) {
        ++rep.failures;
        if (lo < worst) {
          worst = lo;
          os << "min u = " << lo;
          rep.worst = os.str();
        }
      }
    } catch (const std::runtime_error& e) {
      ++rep.failures;
      if (rep.worst.empty()) {
        os << e.what();
        rep.worst = os.str();
      }
    }
  }
  return rep;
}

RowSignAudit row_sign_audit(const transport::TransportOperator& op) {
  RowSignAudit a;
  a.min_weight = kInf;
  a.min_leak = op.leak().minCoeff();
  for (std::size_t i = 0; i < op.size(); ++i) {
    Eigen::VectorXd row = op.kernel_row(i);
    a.max_mass = std::max(a.max_mass, row.sum());
    a.max_defect = std::max(a.max_defect, std::abs(row.sum() + op.leak()[static_cast<Eigen::Index>(i)] - 1.0));
    row[static_cast<Eigen::Index>(i)] = kInf;
    a.min_weight = std::min(a.min_weight, row.minCoeff());
  }
  return a;
}

}  // namespace raddiff::verify
