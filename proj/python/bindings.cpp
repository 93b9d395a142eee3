#include "raddiff/config.hpp"
#include "raddiff/elliptic.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/specfun.hpp"
#include "raddiff/study.hpp"
#include "raddiff/transport.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace raddiff;

namespace {

RunConfig config_of(const std::string& text) { return parse_config(Json::parse(text)); }

Eigen::MatrixXd stack(const std::vector<Vec3>& pts) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return m;
}

py::array_t<double> elementwise(double (*f)(double), const py::array_t<double>& x) {
  return py::vectorize(f)(x);
}

std::vector<milne::BoundaryValue> boundary_map_of(const RunConfig& c) {
  const milne::MilneOperator op(milne::make_grid(c.milne));
  return milne::boundary_temperature_map(c.make_domain(), c.make_source(), c.make_alpha(), c.boundary_samples, op);
}

py::dict milne_solve(const std::string& config, const Vec3& normal) {
  const RunConfig c = config_of(config);
  const milne::MilneOperator op(milne::make_grid(c.milne));
  const PlanarSource G(c.make_source(), normal.normalized());
  const auto p = milne::solve_milne(op, G.sample(op.grid().y));
  const auto lim = milne::milne_limit(op, p, [&G](double x) { return G(x); });
  py::dict d;
  d["y"] = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(op.grid().y.data(), static_cast<Eigen::Index>(op.size())));
  d["u"] = p.u;
  d["residual"] = p.residual;
  d["u_inf"] = lim.u_inf;
  d["u_inf_moment"] = lim.u_inf_moment;
  d["decay_rate"] = lim.decay_rate;
  d["relative_gap"] = lim.relative_gap;
  d["flagged"] = lim.flagged;
  return d;
}

py::dict boundary_map(const std::string& config) {
  const auto map = boundary_map_of(config_of(config));
  std::vector<Vec3> pts;
  Eigen::VectorXd u(static_cast<Eigen::Index>(map.size())), m(u.size());
  bool flagged = false;
  for (std::size_t i = 0; i < map.size(); ++i) {
    pts.push_back(map[i].sample.point);
    u[static_cast<Eigen::Index>(i)] = map[i].u_inf;
    m[static_cast<Eigen::Index>(i)] = map[i].u_inf_moment;
    flagged = flagged || map[i].flagged;
  }
  py::dict d;
  d["points"] = stack(pts);
  d["u_inf"] = u;
  d["u_inf_moment"] = m;
  d["lipschitz_quotient"] = milne::lipschitz_quotient(map);
  d["flagged"] = flagged;
  return d;
}

py::dict transport_solve(const std::string& config, std::optional<double> eps) {
  const RunConfig c = config_of(config);
  const AngularSource src = c.make_source();
  const auto op = transport::make_operator(c.make_domain(), c.make_alpha(), eps.value_or(c.eps.front()),
                                           c.transport_params(), &src);
  const auto f = transport::solve_ueps(op, op->source(src), c.solver);
  py::dict d;
  d["eps"] = op->eps();
  d["layout"] = op->layout() == transport::Layout::Radial ? "radial" : "cartesian";
  d["points"] = stack(op->points());
  d["depth"] = op->depth();
  d["u"] = f.u;
  d["converged"] = f.report.converged;
  d["iterations"] = f.report.iterations;
  d["contraction"] = f.report.contraction;
  d["residual"] = f.report.residual;
  d["error_estimate"] = f.report.error_estimate;
  return d;
}

py::dict elliptic_solve(const std::string& config) {
  const RunConfig c = config_of(config);
  const auto v = elliptic::solve_limit_3d(c.make_domain(), c.make_alpha(), boundary_map_of(c), c.elliptic);
  py::dict d;
  d["points"] = stack(v.points());
  d["v"] = v.v;
  d["iterations"] = v.iterations;
  d["residual"] = v.residual;
  d["data_min"] = v.data_min;
  d["data_max"] = v.data_max;
  return d;
}

py::dict convergence_study(const std::string& config) {
  const auto rep = study::run_convergence_study(config_of(config));
  py::dict d;
  d["json"] = rep.json().dump();
  d["csv"] = rep.csv();
  d["pass"] = rep.pass();
  return d;
}

py::dict verify_suite(const std::string& config) {
  const auto rep = study::run_verify_suite(config_of(config));
  py::dict d;
  d["json"] = rep.json.dump();
  d["pass"] = rep.pass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "grey radiative transfer in the diffusion limit";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("e1", [](const py::array_t<double>& x) { return elementwise(specfun::exp_integral_e1, x); });
  m.def("kernel_K", [](const py::array_t<double>& x) { return elementwise(specfun::kernel_K, x); });
  m.def("kernel_fourier", [](const py::array_t<double>& x) { return elementwise(specfun::kernel_fourier, x); });
  m.def("head_from", [](const py::array_t<double>& x) { return elementwise(specfun::head_from, x); });
  m.def("tail_from", [](const py::array_t<double>& x) { return elementwise(specfun::tail_from, x); });
  m.def("kernel_table", &study::kernel_table_csv, py::arg("lo"), py::arg("hi"), py::arg("step"));

  m.def("normalize_config", [](const std::string& c) { return to_json(config_of(c)).dump(); });
  m.def("config_hash", [](const std::string& c) { return hash_hex(config_hash(config_of(c))); });

  m.def("milne_solve", &milne_solve, py::arg("config"), py::arg("normal"));
  m.def("boundary_map", &boundary_map, py::arg("config"));
  m.def("transport_solve", &transport_solve, py::arg("config"), py::arg("eps") = py::none());
  m.def("elliptic_solve", &elliptic_solve, py::arg("config"));
  m.def("convergence_study", &convergence_study, py::arg("config"));
  m.def("verify_suite", &verify_suite, py::arg("config"));
}
