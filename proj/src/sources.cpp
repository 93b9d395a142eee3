#include "raddiff/sources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace raddiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Tangent frame (t1, t2) orthogonal to a unit pole.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& pole) {
  const RigidMotion m = rigid_motion(BoundarySample{Vec3::Zero(), pole, 1.0});
  return {m.rotation.row(1).transpose(), m.rotation.row(2).transpose()};
}

}  // namespace

AngularSource AngularSource::isotropic(double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) throw std::invalid_argument("source: isotropic level must be >= 0");
  AngularSource g;
  g.kind_ = Kind::Isotropic;
  g.level_ = level;
  g.norm1_ = 4.0 * std::numbers::pi * level;
  g.norm_inf_ = level;
  return g;
}

AngularSource AngularSource::cone(const Vec3& axis, double half_angle, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) throw std::invalid_argument("source: cone level must be >= 0");
  if (!(half_angle > 0.0 && half_angle <= std::numbers::pi)) {
    throw std::invalid_argument("source: cone half-angle must lie in (0, pi]");
  }
  if (!(axis.norm() > 0.0)) throw std::invalid_argument("source: cone axis must be nonzero");
  AngularSource g;
  g.kind_ = Kind::Cone;
  g.level_ = level;
  g.axis_ = axis.normalized();
  g.half_angle_ = half_angle;
  g.cos_half_ = std::cos(half_angle);
  g.norm1_ = kTwoPi * level * (1.0 - g.cos_half_);
  g.norm_inf_ = level;
  return g;
}

AngularSource AngularSource::tabulated(std::vector<double> theta, std::vector<double> phi, std::vector<double> values) {
  if (theta.empty() || phi.empty() || values.size() != theta.size() * phi.size()) {
    throw std::invalid_argument("source: tabulated grid must be a full theta x phi table");
  }
  if (!std::is_sorted(theta.begin(), theta.end()) || !std::is_sorted(phi.begin(), phi.end()) ||
      std::adjacent_find(theta.begin(), theta.end()) != theta.end() ||
      std::adjacent_find(phi.begin(), phi.end()) != phi.end()) {
    throw std::invalid_argument("source: tabulated axes must be strictly increasing");
  }
  if (theta.front() < 0.0 || theta.back() > std::numbers::pi || phi.front() < 0.0 || phi.back() >= kTwoPi) {
    throw std::invalid_argument("source: tabulated angles must satisfy 0 <= theta <= pi, 0 <= phi < 2 pi");
  }
  AngularSource g;
  g.kind_ = Kind::Tabulated;
  g.theta_ = std::move(theta);
  g.phi_ = std::move(phi);
  g.table_ = std::move(values);
  for (double& v : g.table_) v = std::max(v, 0.0);
  g.norm_inf_ = *std::max_element(g.table_.begin(), g.table_.end());
  g.level_ = g.norm_inf_;

  // Integrate the interpolant cell by cell; it is smooth inside every cell.
  std::vector<double> tb{0.0};
  for (double t : g.theta_) tb.push_back(t);
  tb.push_back(std::numbers::pi);
  tb = quad::merge_breakpoints(tb);
  std::vector<double> pb{0.0};
  for (double p : g.phi_) pb.push_back(p);
  pb.push_back(kTwoPi);
  pb = quad::merge_breakpoints(pb);
  const quad::Rule rt = quad::composite(tb, 8);
  const quad::Rule rp = quad::composite(pb, 8);
  double sum = 0.0;
  for (std::size_t i = 0; i < rt.size(); ++i) {
    const double st = std::sin(rt.nodes[i]);
    const double ct = std::cos(rt.nodes[i]);
    double ring = 0.0;
    for (std::size_t j = 0; j < rp.size(); ++j) {
      const Vec3 n(st * std::cos(rp.nodes[j]), st * std::sin(rp.nodes[j]), ct);
      ring += rp.weights[j] * g.value(n);
    }
    sum += rt.weights[i] * st * ring;
  }
  g.norm1_ = sum;
  return g;
}

AngularSource AngularSource::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("source: cannot open table " + path);
  std::map<std::pair<double, double>, double> cells;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find_first_not_of("0123456789.+-eE, \t\r") != std::string::npos) continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0, p = 0.0, v = 0.0;
    if (!(row >> t >> p >> v)) {
      throw std::runtime_error("source: malformed row " + std::to_string(lineno) + " in " + path);
    }
    cells[{t, p}] = v;
  }
  std::vector<double> theta;
  std::vector<double> phi;
  for (const auto& [key, v] : cells) {
    theta.push_back(key.first);
    phi.push_back(key.second);
  }
  std::sort(theta.begin(), theta.end());
  theta.erase(std::unique(theta.begin(), theta.end()), theta.end());
  std::sort(phi.begin(), phi.end());
  phi.erase(std::unique(phi.begin(), phi.end()), phi.end());
  std::vector<double> values;
  values.reserve(theta.size() * phi.size());
  for (double t : theta) {
    for (double p : phi) {
      const auto it = cells.find({t, p});
      if (it == cells.end()) throw std::runtime_error("source: table " + path + " is not a full theta x phi grid");
      values.push_back(it->second);
    }
  }
  return tabulated(std::move(theta), std::move(phi), std::move(values));
}

double AngularSource::value(const Vec3& n) const {
  switch (kind_) {
    case Kind::Isotropic: return level_;
    case Kind::Cone: return n.dot(axis_) >= cos_half_ ? level_ : 0.0;
    case Kind::Tabulated: break;
  }
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = wrap_angle(std::atan2(n.y(), n.x()));

  const std::size_t nt = theta_.size();
  std::size_t i0 = 0, i1 = 0;
  double ft = 0.0;
  if (theta <= theta_.front()) {
    i0 = i1 = 0;
  } else if (theta >= theta_.back()) {
    i0 = i1 = nt - 1;
  } else {
    i1 = std::upper_bound(theta_.begin(), theta_.end(), theta) - theta_.begin();
    i0 = i1 - 1;
    ft = (theta - theta_[i0]) / (theta_[i1] - theta_[i0]);
  }

  const std::size_t np = phi_.size();
  std::size_t j0 = 0, j1 = 0;
  double fp = 0.0;
  if (np > 1) {
    const auto it = std::upper_bound(phi_.begin(), phi_.end(), phi);
    if (it == phi_.begin() || it == phi_.end()) {
      // wrap-around interval between the last and first phi nodes
      j0 = np - 1;
      j1 = 0;
      const double span = phi_.front() + kTwoPi - phi_.back();
      const double offset = (it == phi_.end()) ? phi - phi_.back() : phi + kTwoPi - phi_.back();
      fp = offset / span;
    } else {
      j1 = it - phi_.begin();
      j0 = j1 - 1;
      fp = (phi - phi_[j0]) / (phi_[j1] - phi_[j0]);
    }
  }
  const auto at = [&](std::size_t i, std::size_t j) { return table_[i * np + j]; };
  const double v0 = (1.0 - fp) * at(i0, j0) + fp * at(i0, j1);
  const double v1 = (1.0 - fp) * at(i1, j0) + fp * at(i1, j1);
  return std::max(0.0, (1.0 - ft) * v0 + ft * v1);
}

std::string AngularSource::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Isotropic:
      out << "isotropic(" << level_ << ")";
      break;
    case Kind::Cone:
      out << "cone(axis=" << axis_[0] << "," << axis_[1] << "," << axis_[2] << ", half_angle=" << half_angle_
          << ", level=" << level_ << ")";
      break;
    case Kind::Tabulated:
      out << "tabulated(" << theta_.size() << "x" << phi_.size() << ")";
      break;
  }
  return out.str();
}

double cone_arc_length(const AngularSource& cone, const Vec3& pole, double mu) {
  const double wa = cone.axis().dot(pole);
  const double wt = (cone.axis() - wa * pole).norm();
  const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  const double ch = std::cos(cone.half_angle());
  if (s * wt < 1e-300) return (mu * wa >= ch) ? kTwoPi : 0.0;
  const double q = (ch - mu * wa) / (s * wt);
  if (q <= -1.0) return kTwoPi;
  if (q >= 1.0) return 0.0;
  return 2.0 * std::acos(q);
}

PlanarSource::PlanarSource(const AngularSource& g, const Vec3& N, const HemisphereQuadrature& q) {
  const Vec3 pole = -N.normalized();
  std::vector<double> breaks = quad::geometric_breakpoints(1.0, q.mu_smallest);
  quad::Rule rule;
  if (g.kind() == AngularSource::Kind::Cone) {
    // The azimuthal arc has square-root kinks where the mu-circle touches the
    // cap boundary, at mu = cos(theta0 -+ h).
    const double theta0 = std::acos(std::clamp(g.axis().dot(pole), -1.0, 1.0));
    for (double edge : {std::cos(theta0 - g.half_angle()), std::cos(theta0 + g.half_angle())}) {
      if (edge > 0.0 && edge < 1.0) breaks.push_back(edge);
    }
    rule = quad::composite_cosine(quad::merge_breakpoints(breaks), q.mu_order);
  } else {
    rule = quad::composite(breaks, q.mu_order);
  }
  const auto [t1, t2] = tangent_frame(pole);
  mu_ = rule.nodes;
  weight_.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double mu = rule.nodes[i];
    double ring = 0.0;
    switch (g.kind()) {
      case AngularSource::Kind::Isotropic:
        ring = kTwoPi * g.level();
        break;
      case AngularSource::Kind::Cone:
        ring = g.level() * cone_arc_length(g, pole, mu);
        break;
      case AngularSource::Kind::Tabulated: {
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int j = 0; j < q.phi_nodes; ++j) {
          const double phi = kTwoPi * (j + 0.5) / q.phi_nodes;
          ring += g.value(mu * pole + s * (std::cos(phi) * t1 + std::sin(phi) * t2));
        }
        ring *= kTwoPi / q.phi_nodes;
        break;
      }
    }
    weight_[i] = rule.weights[i] * ring;
    total_ += weight_[i];
  }
}

double PlanarSource::operator()(double x) const {
  if (x < 0.0) throw std::domain_error("planar_source: depth must be nonnegative");
  if (x == 0.0) return total_;
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) sum += weight_[i] * std::exp(-x / mu_[i]);
  return sum;
}

std::vector<double> PlanarSource::sample(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = (*this)(xs[k]);
  return out;
}

double planar_source(const AngularSource& g, const Vec3& N, double x, const HemisphereQuadrature& q) {
  return PlanarSource(g, N, q)(x);
}

DirectionSet sphere_directions(const Vec3& pole, const SphereQuadrature& q, double mu_min) {
  std::vector<double> breaks;
  if (mu_min < 0.0) {
    for (double b : quad::geometric_breakpoints(-mu_min, q.mu_smallest)) breaks.push_back(-b);
    for (double b : quad::geometric_breakpoints(1.0, q.mu_smallest)) breaks.push_back(b);
  } else {
    for (double b : quad::geometric_breakpoints(1.0 - mu_min, q.mu_smallest)) breaks.push_back(mu_min + b);
  }
  const quad::Rule rule = quad::composite(quad::merge_breakpoints(breaks), q.mu_order);
  const auto [t1, t2] = tangent_frame(pole);
  DirectionSet set;
  set.directions.reserve(rule.size() * q.phi_nodes);
  set.weights.reserve(rule.size() * q.phi_nodes);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double mu = rule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < q.phi_nodes; ++j) {
      const double phi = kTwoPi * (j + 0.5) / q.phi_nodes;
      set.directions.push_back(mu * pole + s * (std::cos(phi) * t1 + std::sin(phi) * t2));
      set.weights.push_back(rule.weights[i] * kTwoPi / q.phi_nodes);
    }
  }
  return set;
}

Vec3 domain_source_pole(const AngularSource& g, const ConvexDomain& domain, const Vec3& x) {
  if (g.kind() == AngularSource::Kind::Cone) return g.axis();
  try {
    const Projection pr = domain.project_boundary(x);
    return -domain.normal(pr.point);
  } catch (const std::domain_error&) {
    const Vec3 inward = domain.center() - x;
    return inward.norm() > 0.0 ? Vec3(inward.normalized()) : Vec3(Vec3::UnitZ());
  }
}

double domain_source(const AngularSource& g, const ConvexDomain& domain, const AbsorptionField& alpha, double eps,
                     const Vec3& x, const SphereQuadrature& q) {
  if (!(eps > 0.0)) throw std::domain_error("domain_source: eps must be positive");
  if (g.is_zero()) return 0.0;
  const Vec3 pole = domain_source_pole(g, domain, x);
  const double mu_min = g.kind() == AngularSource::Kind::Cone ? std::cos(g.half_angle()) : -1.0;
  const DirectionSet set = sphere_directions(pole, q, mu_min);
  const double max_panel = q.max_panel_factor * eps;
  double sum = 0.0;
  for (std::size_t k = 0; k < set.directions.size(); ++k) {
    const Vec3& n = set.directions[k];
    const double gv = g.kind() == AngularSource::Kind::Cone ? g.level() : g.value(n);
    if (gv == 0.0) continue;
    const RayExit hit = domain.ray_exit(x, n);
    const double tau = alpha.optical_depth(x, n, hit.distance, max_panel);
    sum += set.weights[k] * gv * std::exp(-tau / eps);
  }
  return sum;
}

}  // namespace raddiff
