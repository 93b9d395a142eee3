#include "raddiff/config.hpp"
#include "raddiff/elliptic.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/study.hpp"
#include "raddiff/transport.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace raddiff;
using study::format_double;
using study::write_text;

namespace {

struct Globals {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
};

RunConfig load(const Globals& g) {
  if (g.config_path.empty()) throw ConfigError("--config is required for this subcommand");
  RunConfig c = load_config(g.config_path);
  if (!g.out.empty()) c.output = g.out;
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::ostream* log_of(const Globals& g) { return g.quiet ? nullptr : &std::cerr; }

int finish(bool pass, const Globals& g, const std::string& what) {
  if (!g.quiet) std::cerr << what << ": " << (pass ? "all checks pass" : "CHECKS FAILED") << "\n";
  return pass ? 0 : 1;
}

Vec3 parse_vec3(const std::vector<double>& v) {
  if (v.size() != 3) throw std::invalid_argument("expected three components");
  return {v[0], v[1], v[2]};
}

int kernel_table(const Globals& g, double lo, double hi, double step) {
  const std::string dir = g.out.empty() ? "out" : g.out;
  const std::string csv = study::kernel_table_csv(lo, hi, step);
  write_text(dir + "/kernel_table.csv", csv);
  // head + tail = 1 row by row
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  bool pass = true;
  while (std::getline(in, line)) {
    std::vector<double> cols;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cols.push_back(std::stod(cell));
    pass = pass && std::abs(cols[3] + cols[4] - 1.0) <= 1e-15;
  }
  return finish(pass, g, "kernel-table");
}

int milne_solve(const Globals& g, const std::vector<double>& normal) {
  const RunConfig c = load(g);
  const AngularSource src = c.make_source();
  const milne::MilneOperator op(milne::make_grid(c.milne));
  const PlanarSource G(src, parse_vec3(normal).normalized());
  const auto profile = milne::solve_milne(op, G.sample(op.grid().y));
  const auto lim = milne::milne_limit(op, profile, [&G](double x) { return G(x); });
  std::ostringstream csv;
  csv << "y [1],u [u]\n";
  for (std::size_t i = 0; i < op.size(); ++i) {
    csv << format_double(op.grid().y[i]) << ',' << format_double(profile.u[static_cast<Eigen::Index>(i)]) << '\n';
  }
  write_text(c.output + "/milne_profile.csv", csv.str());
  const Json j = {{"config_hash", hash_hex(config_hash(c))},
                  {"nodes", op.size()},
                  {"residual", profile.residual},
                  {"u_inf", lim.u_inf},
                  {"u_inf_moment", lim.u_inf_moment},
                  {"decay_rate", std::isfinite(lim.decay_rate) ? Json(lim.decay_rate) : Json(nullptr)},
                  {"relative_gap", lim.relative_gap},
                  {"flagged", lim.flagged}};
  write_text(c.output + "/milne.json", j.dump(2) + "\n");
  if (!g.quiet) std::cerr << "u_inf " << format_double(lim.u_inf) << ", 3 m1(W) " << format_double(lim.u_inf_moment) << "\n";
  return finish(!lim.flagged, g, "milne-solve");
}

std::vector<milne::BoundaryValue> boundary_map(const RunConfig& c) {
  const milne::MilneOperator op(milne::make_grid(c.milne));
  return milne::boundary_temperature_map(c.make_domain(), c.make_source(), c.make_alpha(), c.boundary_samples, op);
}

int boundary_map_cmd(const Globals& g) {
  const RunConfig c = load(g);
  const auto map = boundary_map(c);
  std::ostringstream csv;
  csv << "p_x [length],p_y [length],p_z [length],u_inf [u],u_inf_moment [u]\n";
  bool pass = true;
  for (const auto& b : map) {
    csv << format_double(b.sample.point.x()) << ',' << format_double(b.sample.point.y()) << ','
        << format_double(b.sample.point.z()) << ',' << format_double(b.u_inf) << ',' << format_double(b.u_inf_moment)
        << '\n';
    pass = pass && !b.flagged;
  }
  write_text(c.output + "/boundary_map.csv", csv.str());
  const Json j = {{"config_hash", hash_hex(config_hash(c))},
                  {"samples", map.size()},
                  {"lipschitz_quotient", milne::lipschitz_quotient(map)},
                  {"all_estimators_agree", pass}};
  write_text(c.output + "/boundary_map.json", j.dump(2) + "\n");
  return finish(pass, g, "boundary-map");
}

int transport_solve(const Globals& g, std::optional<double> eps_flag) {
  const RunConfig c = load(g);
  const double eps = eps_flag.value_or(c.eps.front());
  const ConvexDomain domain = c.make_domain();
  const AngularSource src = c.make_source();
  const auto op = transport::make_operator(domain, c.make_alpha(), eps, c.transport_params(), &src);
  const auto field = transport::solve_ueps(op, op->source(src), c.solver);
  std::ostringstream csv;
  const bool radial = op->layout() == transport::Layout::Radial;
  csv << (radial ? "r [length],u [u]\n" : "x [length],y [length],z [length],u [u]\n");
  for (std::size_t i = 0; i < op->size(); ++i) {
    const Vec3& p = op->points()[i];
    if (radial) {
      csv << format_double(op->radial_mesh()->r[i]);
    } else {
      csv << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z());
    }
    csv << ',' << format_double(field.u[static_cast<Eigen::Index>(i)]) << '\n';
  }
  write_text(c.output + "/transport.csv", csv.str());
  const Json j = {{"config_hash", hash_hex(config_hash(c))},
                  {"eps", eps},
                  {"layout", radial ? "radial" : "cartesian"},
                  {"nodes", op->size()},
                  {"resolved", op->resolved()},
                  {"iterations", field.report.iterations},
                  {"converged", field.report.converged},
                  {"contraction", field.report.contraction},
                  {"residual", field.report.residual},
                  {"error_estimate", field.report.error_estimate}};
  write_text(c.output + "/transport.json", j.dump(2) + "\n");
  return finish(field.report.converged, g, "transport-solve");
}

int elliptic_solve(const Globals& g) {
  const RunConfig c = load(g);
  const auto map = boundary_map(c);
  const auto v = elliptic::solve_limit_3d(c.make_domain(), c.make_alpha(), map, c.elliptic);
  std::ostringstream csv;
  csv << "x [length],y [length],z [length],v [u]\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec3& p = v.points()[i];
    csv << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << ','
        << format_double(v.v[static_cast<Eigen::Index>(i)]) << '\n';
  }
  write_text(c.output + "/elliptic.csv", csv.str());
  const Json j = {{"config_hash", hash_hex(config_hash(c))}, {"nodes", v.size()},        {"iterations", v.iterations},
                  {"residual", v.residual},                  {"data_min", v.data_min}, {"data_max", v.data_max}};
  write_text(c.output + "/elliptic.json", j.dump(2) + "\n");
  return finish(true, g, "elliptic-solve");
}

int convergence_study(const Globals& g) {
  const RunConfig c = load(g);
  const auto rep = study::run_convergence_study(c, log_of(g));
  study::write_study(rep, c.output);
  if (!g.quiet) {
    for (const auto& k : rep.checks) std::cerr << (k.pass ? "PASS " : "FAIL ") << k.name << " " << k.detail << "\n";
  }
  return finish(rep.pass(), g, "convergence-study");
}

int verify_suite(const Globals& g) {
  const RunConfig c = load(g);
  const auto rep = study::run_verify_suite(c, log_of(g));
  write_text(c.output + "/verify.json", rep.json.dump(2) + "\n");
  if (!g.quiet) {
    for (const auto& k : rep.checks) std::cerr << (k.pass ? "PASS " : "FAIL ") << k.name << " " << k.detail << "\n";
  }
  return finish(rep.pass(), g, "verify-suite");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"raddiff: grey radiative transfer in the diffusion limit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "run configuration (JSON)");
  app.add_option("--out", g.out, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "seed (overrides the config)");
  app.add_option("--threads", g.threads, "OpenMP threads, 0 for the runtime default")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "no progress output");

  double lo = 0.01, hi = 10.0, step = 0.01;
  auto* kt = app.add_subcommand("kernel-table", "tabulate K, E1 and its masses and moments");
  kt->add_option("--lo", lo, "first x");
  kt->add_option("--hi", hi, "last x");
  kt->add_option("--step", step, "spacing")->check(CLI::PositiveNumber);

  std::vector<double> normal{0.0, 0.0, 1.0};
  auto* ms = app.add_subcommand("milne-solve", "half-space profile for the configured source");
  ms->add_option("--normal", normal, "outward normal of the half space")->expected(3);

  auto* bm = app.add_subcommand("boundary-map", "boundary temperature functional at Fibonacci samples");
  double eps = 0.0;
  auto* ts = app.add_subcommand("transport-solve", "u_eps for one eps");
  auto* eps_opt = ts->add_option("--eps", eps, "eps (default: first of the config)")->check(CLI::PositiveNumber);
  auto* es = app.add_subcommand("elliptic-solve", "limit problem with the boundary map as data");
  auto* cs = app.add_subcommand("convergence-study", "eps sweep against the limit solution");
  auto* vs = app.add_subcommand("verify-suite", "positivity, audits and supersolution margins");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;
#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*kt) return kernel_table(g, lo, hi, step);
    if (*ms) return milne_solve(g, normal);
    if (*bm) return boundary_map_cmd(g);
    if (*ts) return transport_solve(g, *eps_opt ? std::optional<double>(eps) : std::nullopt);
    if (*es) return elliptic_solve(g);
    if (*cs) return convergence_study(g);
    if (*vs) return verify_suite(g);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
