#include "raddiff/study.hpp"
#include "raddiff/specfun.hpp"
#include "raddiff/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace raddiff::study {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json checks_json(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return out;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v[k]);
    s += (k ? ", " : "") + std::string(buf);
  }
  return s;
}

// Half-space profiles at the layer samples; they depend on g and the
// normal only, so they are shared by every eps.
struct LayerProfile {
  BoundarySample sample;
  milne::HalfLineProfile profile;
};

std::vector<LayerProfile> layer_profiles(const ConvexDomain& domain, const AngularSource& g,
                                         const milne::MilneOperator& op, int count) {
  std::vector<LayerProfile> out;
  for (const auto& s : domain.fibonacci_samples(count)) {
    const PlanarSource G(g, s.normal);
    const auto gs = G.sample(op.grid().y);
    out.push_back({s, milne::solve_milne(op, gs)});
  }
  return out;
}

elliptic::LimitField solve_limit(const RunConfig& config, const ConvexDomain& domain, const AbsorptionField& alpha,
                                 const std::vector<milne::BoundaryValue>& map, LimitInfo& info) {
  double lo = kInf, hi = -kInf;
  for (const auto& b : map) {
    lo = std::min(lo, b.u_inf);
    hi = std::max(hi, b.u_inf);
  }
  info.data_min = lo;
  info.data_max = hi;
  // constant data: v is that constant for every alpha
  if (hi - lo <= 1e-9 * std::max(1.0, std::abs(hi)) && domain.is_ball() && alpha.is_radial()) {
    info.method = "constant";
    double mean = 0.0;
    for (const auto& b : map) mean += b.u_inf;
    mean /= static_cast<double>(map.size());
    return elliptic::solve_limit_radial(alpha, mean, domain.semi_axes().x(), domain.center());
  }
  info.method = "finite-difference";
  auto v = elliptic::solve_limit_3d(domain, alpha, map, config.elliptic);
  info.iterations = v.iterations;
  info.residual = v.residual;
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool decreasing_or_floor(const std::vector<double>& values, double floor, bool strict) {
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v <= floor; })) return true;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (strict ? !(values[k] < values[k - 1]) : !(values[k] <= values[k - 1])) return false;
  }
  return true;
}

bool StudyReport::pass() const { return all_pass(checks); }

std::string StudyReport::csv() const {
  std::ostringstream out;
  out << "eps [length],status,layout,nodes,resolved,sup_error [u],l2_error [u length^1.5],relative_sup [1],"
         "compared_nodes,iterations,contraction [1],residual [u],error_estimate [u],layer_match [u],"
         "layer_depth [length],config_hash\n";
  for (const auto& r : records) {
    out << format_double(r.eps) << ',' << (r.ok ? "ok" : "failed") << ',' << r.layout << ',' << r.nodes << ','
        << (r.resolved ? 1 : 0) << ',' << format_double(r.sup_error) << ',' << format_double(r.l2_error) << ','
        << format_double(r.relative_sup) << ',' << r.compared << ',' << r.iterations << ','
        << format_double(r.contraction) << ',' << format_double(r.residual) << ',' << format_double(r.error_estimate)
        << ',' << format_double(r.layer_match) << ',' << format_double(r.layer_depth) << ',' << config_hash << '\n';
  }
  return out.str();
}

Json StudyReport::json() const {
  Json recs = Json::array();
  for (const auto& r : records) {
    Json j = {{"eps", r.eps},
              {"ok", r.ok},
              {"layout", r.layout},
              {"nodes", r.nodes},
              {"resolved", r.resolved},
              {"sup_error", r.sup_error},
              {"l2_error", r.l2_error},
              {"relative_sup", r.relative_sup},
              {"compared_nodes", r.compared},
              {"iterations", r.iterations},
              {"contraction", r.contraction},
              {"residual", r.residual},
              {"error_estimate", r.error_estimate},
              {"layer_match", r.layer_match},
              {"layer_depth", r.layer_depth},
              {"config_hash", config_hash}};
    if (!r.ok) j["error"] = r.error;
    recs.push_back(std::move(j));
  }
  return {{"config_hash", config_hash},
          {"config", config},
          {"limit",
           {{"method", limit.method},
            {"data_min", limit.data_min},
            {"data_max", limit.data_max},
            {"iterations", limit.iterations},
            {"residual", limit.residual}}},
          {"records", recs},
          {"checks", checks_json(checks)},
          {"pass", pass()}};
}

std::string StudyReport::timings_csv() const {
  std::ostringstream out;
  out << "eps [length],runtime [s]\n";
  for (const auto& r : records) out << format_double(r.eps) << ',' << format_double(r.runtime_s) << '\n';
  return out.str();
}

StudyReport run_convergence_study(const RunConfig& config, std::ostream* log) {
  StudyReport rep;
  rep.config = to_json(config);
  rep.config_hash = hash_hex(config_hash(config));
  const ConvexDomain domain = config.make_domain();
  const AbsorptionField alpha = config.make_alpha();
  const AngularSource g = config.make_source();

  const milne::MilneOperator mop(milne::make_grid(config.milne));
  const auto map = milne::boundary_temperature_map(domain, g, alpha, config.boundary_samples, mop);
  const auto v = solve_limit(config, domain, alpha, map, rep.limit);
  const auto layers = layer_profiles(domain, g, mop, config.layer_samples);
  if (log) *log << "limit: " << rep.limit.method << ", data in [" << rep.limit.data_min << ", " << rep.limit.data_max << "]\n";

  for (double eps : config.eps) {
    StudyRecord r;
    r.eps = eps;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto op = transport::make_operator(domain, alpha, eps, config.transport_params(), &g);
      r.layout = op->layout() == transport::Layout::Radial ? "radial" : "cartesian";
      r.nodes = op->size();
      r.resolved = op->resolved();
      const auto field = transport::solve_ueps(op, op->source(g), config.solver);
      if (!field.report.converged) {
        throw std::runtime_error("Picard iteration not converged after " + std::to_string(field.report.iterations) +
                                 " iterations");
      }
      r.iterations = field.report.iterations;
      r.contraction = field.report.contraction;
      r.residual = field.report.residual;
      r.error_estimate = field.report.error_estimate;
      const auto cmp = elliptic::compare_fields(field, v, config.margin);
      r.sup_error = cmp.sup;
      r.l2_error = cmp.l2;
      r.relative_sup = cmp.relative_sup;
      r.compared = cmp.count;
      for (const auto& L : layers) {
        const auto m = transport::boundary_layer_match(field, L.profile, L.sample);
        if (m.sup_difference >= r.layer_match) {
          r.layer_match = m.sup_difference;
          r.layer_depth = m.at_depth;
        }
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.runtime_s = seconds_since(t0);
    if (log) {
      *log << "eps " << eps << ": " << (r.ok ? "ok" : "failed: " + r.error) << ", sup error " << r.sup_error
           << ", layer match " << r.layer_match << ", " << r.iterations << " iterations, " << r.runtime_s << " s\n";
    }
    rep.records.push_back(std::move(r));
  }

  const double scale = std::max({1.0, std::abs(rep.limit.data_min), std::abs(rep.limit.data_max)});
  std::vector<double> sup, layer;
  bool all_ok = true;
  for (const auto& r : rep.records) {
    all_ok = all_ok && r.ok;
    sup.push_back(r.sup_error);
    layer.push_back(r.layer_match);
  }
  rep.checks.push_back({"all_eps_solved", all_ok, all_ok ? "" : "see records with ok = false"});
  rep.checks.push_back({"sup_error_decreasing", all_ok && decreasing_or_floor(sup, 1e-8 * scale),
                        "sup errors: " + join(sup)});
  rep.checks.push_back({"layer_match_decreasing", all_ok && decreasing_or_floor(layer, 1e-8 * scale, false),
                        "layer matches: " + join(layer)});
  return rep;
}

void write_study(const StudyReport& report, const std::string& dir) {
  write_text(dir + "/study.csv", report.csv());
  write_text(dir + "/study.json", report.json().dump(2) + "\n");
  write_text(dir + "/timings.csv", report.timings_csv());
}

std::string kernel_table_csv(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("kernel table: need lo <= hi and step > 0");
  }
  const auto rows = static_cast<long>(std::floor((hi - lo) / step * (1.0 + 1e-12))) + 1;
  std::ostringstream out;
  out << "x [1],K [1],E1 [1],head [1],tail [1],first_moment_tail [1],fourier [1]\n";
  for (long k = 0; k < rows; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    if (x == 0.0 || std::abs(x) < 1e-14 * step) {
      throw std::invalid_argument("kernel table: the range hits x = 0, where K is singular; shift lo or step");
    }
    const double a = std::abs(x);
    // mass of K over (x, inf) and (-x, inf); K is even and s K(s) odd
    const double tail = x > 0.0 ? specfun::tail_from(a) : specfun::head_from(a);
    const double head = x > 0.0 ? specfun::head_from(a) : specfun::tail_from(a);
    out << format_double(x) << ',' << format_double(specfun::kernel_K(x)) << ','
        << format_double(specfun::exp_integral_e1(a)) << ',' << format_double(head) << ',' << format_double(tail)
        << ',' << format_double(specfun::first_moment_tail(a)) << ',' << format_double(specfun::kernel_fourier(x))
        << '\n';
  }
  return out.str();
}

bool VerifyReport::pass() const { return all_pass(checks); }

VerifyReport run_verify_suite(const RunConfig& config, std::ostream* log) {
  VerifyReport rep;
  const ConvexDomain domain = config.make_domain();
  const AbsorptionField alpha = config.make_alpha();
  const AngularSource g = config.make_source();
  Json j = {{"config_hash", hash_hex(config_hash(config))}, {"config", to_json(config)}};

  // Milne
  const milne::MilneOperator mop(milne::make_grid(config.milne));
  const auto audit = mop.audit();
  const auto mpos = verify::positivity_harness(mop, config.positivity_trials_milne, config.seed);
  const auto mflip = verify::positivity_harness(mop, 3, config.seed, true);
  j["milne"] = {{"nodes", mop.size()},
                {"row_audit",
                 {{"max_offdiagonal", audit.max_offdiagonal},
                  {"min_diagonal", audit.min_diagonal},
                  {"min_row_sum", audit.min_row_sum},
                  {"max_row_defect", audit.max_row_defect},
                  {"ok", audit.ok()}}},
                {"positivity", {{"trials", mpos.trials}, {"failures", mpos.failures}, {"min_value", mpos.min_value}}},
                {"flipped_detected", !mflip.pass()}};
  rep.checks.push_back({"milne_row_audit", audit.ok(), ""});
  rep.checks.push_back({"milne_positivity", mpos.pass(), mpos.worst});
  rep.checks.push_back({"milne_flip_detected", !mflip.pass(), ""});
  if (log) *log << "milne: audit " << audit.ok() << ", positivity " << mpos.failures << "/" << mpos.trials << " failures\n";

  // transport operators of the sweep
  std::vector<std::shared_ptr<const transport::TransportOperator>> ops;
  for (double eps : config.eps) ops.push_back(transport::make_operator(domain, alpha, eps, config.transport_params(), &g));
  Json per_eps = Json::array();
  bool pos_ok = true, audit_ok = true, flip_ok = true;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto a = verify::row_sign_audit(*ops[k]);
    const auto pos = verify::positivity_harness(ops[k], config.positivity_trials_transport, config.seed + k);
    const auto flip = verify::positivity_harness(ops[k], 1, config.seed + k, true);
    pos_ok = pos_ok && pos.pass();
    audit_ok = audit_ok && a.ok();
    flip_ok = flip_ok && !flip.pass();
    per_eps.push_back({{"eps", ops[k]->eps()},
                       {"nodes", ops[k]->size()},
                       {"row_audit", {{"min_weight", a.min_weight},
                         {"max_mass", a.max_mass},
                         {"min_leak", a.min_leak},
                         {"max_defect", a.max_defect},
                         {"ok", a.ok()}}},
                       {"positivity",
                        {{"trials", pos.trials}, {"failures", pos.failures}, {"min_value", pos.min_value},
                         {"worst", pos.worst}}},
                       {"flipped_detected", !flip.pass()}});
    if (log) *log << "eps " << ops[k]->eps() << ": audit " << a.ok() << ", positivity " << pos.failures << "/" << pos.trials << " failures\n";
  }
  rep.checks.push_back({"transport_row_audit", audit_ok, ""});
  rep.checks.push_back({"transport_positivity", pos_ok, ""});
  rep.checks.push_back({"transport_flip_detected", flip_ok, ""});

  // supersolution
  const auto variant = alpha.is_constant() ? verify::Variant::Constant : verify::Variant::Variable;
  Json sup = {{"variant", variant == verify::Variant::Constant ? "constant" : "variable"}};
  try {
    const auto p = verify::search(domain, alpha, g, variant, ops);
    const double bound = p.uniform_bound();
    sup["params"] = {{"mu", p.mu},     {"gamma", p.gamma}, {"C1", p.C1}, {"C2", p.C2}, {"C3", p.C3},
                     {"lambda", p.lambda}, {"R", p.R},     {"D", p.D},   {"c0", p.c0}, {"c1", p.c1}};
    sup["uniform_bound"] = bound;
    Json margins = Json::array();
    bool window_ok = true, dom_ok = true, bound_ok = true;
    std::vector<double> min_margins;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const auto& op = ops[k];
      const auto probes = verify::layer_probes(domain, op->eps(), config.probe_directions);
      const auto m = verify::check_supersolution(p, *op, probes);
      const auto field = transport::solve_ueps(op, op->source(g), config.solver);
      if (!field.report.converged) throw std::runtime_error("Picard iteration not converged at eps " + std::to_string(op->eps()));
      double dom = kInf, phi_max = 0.0;
      for (std::size_t i = 0; i < op->size(); ++i) {
        const double phi = verify::phi_eps(op->points()[i], p, op->eps(), domain);
        dom = std::min(dom, phi - field.u[static_cast<Eigen::Index>(i)]);
        phi_max = std::max(phi_max, phi);
      }
      const double slack = 1e-10 * std::max(1.0, field.u.cwiseAbs().maxCoeff());
      if (m.within_window) window_ok = window_ok && m.min_margin >= 0.0;
      dom_ok = dom_ok && dom >= -slack;
      bound_ok = bound_ok && phi_max <= bound;
      min_margins.push_back(m.min_margin);
      margins.push_back({{"eps", op->eps()},
                         {"within_window", m.within_window},
                         {"probes", m.probes.size()},
                         {"min_margin", m.min_margin},
                         {"min_relative", m.min_relative},
                         {"argmin_depth", m.probes[m.argmin].depth},
                         {"domination_min", dom},
                         {"phi_max", phi_max}});
      if (log) *log << "eps " << op->eps() << ": min margin " << m.min_margin << ", min(Phi - u) " << dom << "\n";
    }
    // largest sweep eps from which every smaller one keeps nonnegative margins
    Json eps0 = nullptr;
    for (std::size_t k = ops.size(); k-- > 0;) {
      if (min_margins[k] < 0.0) break;
      eps0 = ops[k]->eps();
    }
    sup["margins"] = margins;
    sup["empirical_eps0"] = eps0;
    rep.checks.push_back({"supersolution_margins_in_window", window_ok, ""});
    rep.checks.push_back({"supersolution_domination", dom_ok, ""});
    rep.checks.push_back({"supersolution_uniform_bound", bound_ok, ""});
  } catch (const std::exception& e) {
    sup["error"] = e.what();
    rep.checks.push_back({"supersolution_search", false, e.what()});
  }

  j["transport"] = per_eps;
  j["supersolution"] = sup;
  j["checks"] = checks_json(rep.checks);
  j["pass"] = rep.pass();
  rep.json = std::move(j);
  return rep;
}

}  // namespace raddiff::study
