#include "raddiff/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

namespace raddiff {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError("config: " + key + ": " + what); }

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.contains(k)) fail(where.empty() ? k : where + "." + k, "unknown key");
  }
}

double number(const Json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(key, "must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) fail(key, "must be finite");
  return v;
}

double positive(const Json& j, const std::string& key, double fallback) {
  const double v = number(j, key, fallback);
  if (!(v > 0.0)) fail(key, "must be positive");
  return v;
}

int positive_int(const Json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail(key, "must be an integer");
  const auto v = j.at(key).get<long long>();
  if (v < 1 || v > std::numeric_limits<int>::max()) fail(key, "must be a positive integer");
  return static_cast<int>(v);
}

Vec3 vec3(const Json& j, const std::string& key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) fail(key, "must be an array of 3 numbers");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!a[static_cast<std::size_t>(k)].is_number()) fail(key, "must be an array of 3 numbers");
    v[k] = a[static_cast<std::size_t>(k)].get<double>();
  }
  return v;
}

// Runs a section parser and prefixes the key in its errors with the section name.
template <class F>
auto in_section(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const std::string head = "config: ";
    if (msg.rfind(head + name, 0) == 0) throw;
    const std::string rest = msg.substr(head.size());
    throw ConfigError(head + name + (rest.rfind(": ", 0) == 0 ? "" : ".") + rest);
  }
}

Json to_array(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

std::vector<double> numbers(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) fail(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) fail(key, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json normalize_domain(const Json& j) {
  only_keys(j, "", {"shape", "radius", "semi_axes", "center"});
  const std::string shape = j.value("shape", "ball");
  const Vec3 center = vec3(j, "center", Vec3::Zero());
  if (shape == "ball") {
    const double r = positive(j, "radius", 1.0);
    return {{"shape", "ball"}, {"radius", r}, {"center", to_array(center)}};
  }
  if (shape == "ellipsoid") {
    const Vec3 a = vec3(j, "semi_axes", Vec3::Ones());
    if (!(a.minCoeff() > 0.0)) fail("semi_axes", "must be positive");
    return {{"shape", "ellipsoid"}, {"semi_axes", to_array(a)}, {"center", to_array(center)}};
  }
  fail("shape", "must be \"ball\" or \"ellipsoid\"");
}

Json normalize_alpha(const Json& j) {
  only_keys(j, "", {"kind", "value", "coeffs", "center", "origin", "spacing", "dims", "values"});
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant") return {{"kind", "constant"}, {"value", positive(j, "value", 1.0)}};
  if (kind == "radial") {
    const auto coeffs = numbers(j, "coeffs");
    if (coeffs.empty()) fail("coeffs", "must not be empty");
    return {{"kind", "radial"}, {"coeffs", coeffs}, {"center", to_array(vec3(j, "center", Vec3::Zero()))}};
  }
  if (kind == "grid") {
    if (!j.contains("dims") || !j.at("dims").is_array() || j.at("dims").size() != 3) {
      fail("dims", "must be an array of 3 integers");
    }
    std::array<int, 3> dims{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!j.at("dims")[k].is_number_integer() || j.at("dims")[k].get<int>() < 1) {
        fail("dims", "must be positive integers");
      }
      dims[k] = j.at("dims")[k].get<int>();
    }
    const auto values = numbers(j, "values");
    const Vec3 spacing = vec3(j, "spacing", Vec3::Ones());
    if (!(spacing.minCoeff() > 0.0)) fail("spacing", "must be positive");
    return {{"kind", "grid"}, {"origin", to_array(vec3(j, "origin", Vec3::Zero()))}, {"spacing", to_array(spacing)},
            {"dims", dims}, {"values", values}};
  }
  fail("kind", "must be \"constant\", \"radial\" or \"grid\"");
}

Json normalize_source(const Json& j) {
  only_keys(j, "", {"kind", "level", "axis", "half_angle", "path"});
  const std::string kind = j.value("kind", "isotropic");
  if (kind == "isotropic") {
    const double c = number(j, "level", 1.0);
    if (c < 0.0) fail("level", "must be nonnegative");
    return {{"kind", "isotropic"}, {"level", c}};
  }
  if (kind == "cone") {
    const double c = number(j, "level", 1.0);
    if (c < 0.0) fail("level", "must be nonnegative");
    const Vec3 axis = vec3(j, "axis", Vec3::UnitZ());
    if (!(axis.norm() > 0.0)) fail("axis", "must be nonzero");
    const double half = positive(j, "half_angle", 0.5);
    return {{"kind", "cone"}, {"axis", to_array(axis)}, {"half_angle", half}, {"level", c}};
  }
  if (kind == "tabulated") {
    if (!j.contains("path") || !j.at("path").is_string()) fail("path", "must be a string");
    return {{"kind", "tabulated"}, {"path", j.at("path").get<std::string>()}};
  }
  fail("kind", "must be \"isotropic\", \"cone\" or \"tabulated\"");
}

const char* layout_name(transport::Layout l) {
  switch (l) {
    case transport::Layout::Radial:
      return "radial";
    case transport::Layout::Cartesian:
      return "cartesian";
    default:
      return "auto";
  }
}

}  // namespace

ConvexDomain RunConfig::make_domain() const {
  const Json d = normalize_domain(domain);
  const Vec3 c = vec3(d, "center", Vec3::Zero());
  if (d.at("shape") == "ball") return ConvexDomain::ball(d.at("radius").get<double>(), c);
  return ConvexDomain::ellipsoid(vec3(d, "semi_axes", Vec3::Ones()), c);
}

AbsorptionField RunConfig::make_alpha() const {
  const Json a = normalize_alpha(alpha);
  const std::string kind = a.at("kind");
  if (kind == "constant") return AbsorptionField::constant(a.at("value").get<double>());
  if (kind == "radial") {
    const ConvexDomain d = make_domain();
    const Vec3 c = vec3(a, "center", Vec3::Zero());
    const double r_max = (d.center() - c).norm() + d.semi_axes().maxCoeff();
    return AbsorptionField::radial(a.at("coeffs").get<std::vector<double>>(), c, r_max);
  }
  return AbsorptionField::grid(vec3(a, "origin", Vec3::Zero()), vec3(a, "spacing", Vec3::Ones()),
                               a.at("dims").get<std::array<int, 3>>(), a.at("values").get<std::vector<double>>());
}

AngularSource RunConfig::make_source() const {
  const Json s = normalize_source(source);
  const std::string kind = s.at("kind");
  if (kind == "isotropic") return AngularSource::isotropic(s.at("level").get<double>());
  if (kind == "cone") {
    return AngularSource::cone(vec3(s, "axis", Vec3::UnitZ()).normalized(), s.at("half_angle").get<double>(),
                               s.at("level").get<double>());
  }
  return AngularSource::from_csv(s.at("path").get<std::string>());
}

transport::TransportParams RunConfig::transport_params() const {
  transport::TransportParams p;
  p.layout = layout;
  p.mesh = mesh;
  return p;
}

RunConfig parse_config(const Json& j) {
  only_keys(j, "config", {"domain", "alpha", "source", "eps", "mesh", "solver", "elliptic", "milne", "study", "output",
                          "seed"});
  RunConfig c;
  if (j.contains("domain")) c.domain = j.at("domain");
  if (j.contains("alpha")) c.alpha = j.at("alpha");
  if (j.contains("source")) c.source = j.at("source");
  c.domain = in_section("domain", [&] { return normalize_domain(c.domain); });
  c.alpha = in_section("alpha", [&] { return normalize_alpha(c.alpha); });
  c.source = in_section("source", [&] { return normalize_source(c.source); });

  c.eps = numbers(j, "eps");
  if (c.eps.empty()) fail("eps", "must list at least one value");
  for (std::size_t k = 0; k < c.eps.size(); ++k) {
    if (!(c.eps[k] > 0.0 && c.eps[k] < 1.0)) fail("eps", "values must lie in (0, 1)");
    if (k > 0 && !(c.eps[k] < c.eps[k - 1])) {
      fail("eps", "must be strictly decreasing (entry " + std::to_string(k) + " is not below entry " +
                      std::to_string(k - 1) + ")");
    }
  }

  if (j.contains("mesh")) {
    const Json& m = j.at("mesh");
    only_keys(m, "mesh", {"n", "grading", "boundary_spacing", "interior_spacing", "layout"});
    c.mesh.n = positive_int(m, "n", c.mesh.n);
    c.mesh.grading = positive(m, "grading", c.mesh.grading);
    if (!(c.mesh.grading >= 1.0)) fail("mesh.grading", "must be >= 1");
    c.mesh.boundary_spacing = positive(m, "boundary_spacing", c.mesh.boundary_spacing);
    c.mesh.interior_spacing = positive(m, "interior_spacing", c.mesh.interior_spacing);
    const std::string layout = m.value("layout", "auto");
    if (layout == "auto") {
      c.layout = transport::Layout::Auto;
    } else if (layout == "radial") {
      c.layout = transport::Layout::Radial;
    } else if (layout == "cartesian") {
      c.layout = transport::Layout::Cartesian;
    } else {
      fail("mesh.layout", "must be \"auto\", \"radial\" or \"cartesian\"");
    }
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    only_keys(s, "solver", {"tol", "max_iters"});
    c.solver.tol = positive(s, "tol", c.solver.tol);
    c.solver.max_iters = positive_int(s, "max_iters", c.solver.max_iters);
  }
  if (j.contains("elliptic")) {
    const Json& e = j.at("elliptic");
    only_keys(e, "elliptic", {"n", "tol", "max_iters"});
    c.elliptic.n = positive_int(e, "n", c.elliptic.n);
    c.elliptic.tol = positive(e, "tol", c.elliptic.tol);
    c.elliptic.max_iters = positive_int(e, "max_iters", c.elliptic.max_iters);
  }
  if (j.contains("milne")) {
    const Json& m = j.at("milne");
    only_keys(m, "milne", {"y_max", "h0", "ratio", "h_max"});
    c.milne.y_max = positive(m, "y_max", c.milne.y_max);
    c.milne.h0 = positive(m, "h0", c.milne.h0);
    c.milne.ratio = positive(m, "ratio", c.milne.ratio);
    c.milne.h_max = positive(m, "h_max", c.milne.h_max);
  }
  if (j.contains("study")) {
    const Json& s = j.at("study");
    only_keys(s, "study", {"margin", "boundary_samples", "layer_samples", "probe_directions",
                           "positivity_trials_milne", "positivity_trials_transport"});
    c.margin = number(s, "margin", c.margin);
    if (c.margin < 0.0) fail("study.margin", "must be nonnegative");
    c.boundary_samples = positive_int(s, "boundary_samples", c.boundary_samples);
    c.layer_samples = positive_int(s, "layer_samples", c.layer_samples);
    c.probe_directions = positive_int(s, "probe_directions", c.probe_directions);
    c.positivity_trials_milne = positive_int(s, "positivity_trials_milne", c.positivity_trials_milne);
    c.positivity_trials_transport = positive_int(s, "positivity_trials_transport", c.positivity_trials_transport);
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) fail("output", "must be a string");
    c.output = j.at("output").get<std::string>();
  }
  if (j.contains("seed")) {
    const Json& seed = j.at("seed");
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) fail("seed", "must be a nonnegative integer");
    c.seed = seed.get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const RunConfig& c) {
  return {
      {"domain", c.domain},
      {"alpha", c.alpha},
      {"source", c.source},
      {"eps", c.eps},
      {"mesh",
       {{"n", c.mesh.n},
        {"grading", c.mesh.grading},
        {"boundary_spacing", c.mesh.boundary_spacing},
        {"interior_spacing", c.mesh.interior_spacing},
        {"layout", layout_name(c.layout)}}},
      {"solver", {{"tol", c.solver.tol}, {"max_iters", c.solver.max_iters}}},
      {"elliptic", {{"n", c.elliptic.n}, {"tol", c.elliptic.tol}, {"max_iters", c.elliptic.max_iters}}},
      {"milne", {{"y_max", c.milne.y_max}, {"h0", c.milne.h0}, {"ratio", c.milne.ratio}, {"h_max", c.milne.h_max}}},
      {"study",
       {{"margin", c.margin},
        {"boundary_samples", c.boundary_samples},
        {"layer_samples", c.layer_samples},
        {"probe_directions", c.probe_directions},
        {"positivity_trials_milne", c.positivity_trials_milne},
        {"positivity_trials_transport", c.positivity_trials_transport}}},
      {"output", c.output},
      {"seed", c.seed},
  };
}

std::uint64_t config_hash(const RunConfig& c) {
  Json j = to_json(c);
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace raddiff
