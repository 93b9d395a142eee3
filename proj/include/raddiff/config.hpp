#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/elliptic.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/sources.hpp"
#include "raddiff/transport.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace raddiff {

using Json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One experiment. The JSON schema (every key optional except where noted):
///
///   domain    {"shape": "ball", "radius": 1, "center": [0,0,0]}
///             {"shape": "ellipsoid", "semi_axes": [a,b,c], "center": [...]}
///   alpha     {"kind": "constant", "value": 1}
///             {"kind": "radial", "coeffs": [a0, a1, ...], "center": [...]}
///             {"kind": "grid", "origin": [...], "spacing": [...], "dims": [nx,ny,nz], "values": [...]}
///   source    {"kind": "isotropic", "level": 1}
///             {"kind": "cone", "axis": [...], "half_angle": 0.5, "level": 1}
///             {"kind": "tabulated", "path": "table.csv"}
///   eps       [0.2, 0.1, 0.05, 0.025]   strictly decreasing, required
///   mesh      {"n", "grading", "boundary_spacing", "interior_spacing", "layout": "auto|radial|cartesian"}
///   solver    {"tol", "max_iters"}
///   elliptic  {"n", "tol", "max_iters"}
///   milne     {"y_max", "h0", "ratio", "h_max"}
///   study     {"margin", "boundary_samples", "layer_samples", "probe_directions",
///              "positivity_trials_milne", "positivity_trials_transport"}
///   output    directory, default "out"
///   seed      nonnegative integer
struct RunConfig {
  Json domain = {{"shape", "ball"}, {"radius", 1.0}};
  Json alpha = {{"kind", "constant"}, {"value", 1.0}};
  Json source = {{"kind", "isotropic"}, {"level", 1.0}};
  std::vector<double> eps;
  MeshParams mesh;
  transport::Layout layout = transport::Layout::Auto;
  transport::SolveParams solver;
  elliptic::EllipticParams elliptic;
  milne::GridParams milne;
  double margin = 0.3;
  int boundary_samples = 64;
  int layer_samples = 8;
  int probe_directions = 6;
  int positivity_trials_milne = 100;
  int positivity_trials_transport = 20;
  std::string output = "out";
  std::uint64_t seed = 1;

  [[nodiscard]] ConvexDomain make_domain() const;
  [[nodiscard]] AbsorptionField make_alpha() const;
  [[nodiscard]] AngularSource make_source() const;
  [[nodiscard]] transport::TransportParams transport_params() const;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
/// Normalized form with every default filled in; parse_config(to_json(c)) == c.
Json to_json(const RunConfig& c);

/// FNV-1a 64 of the normalized JSON without the output directory.
std::uint64_t config_hash(const RunConfig& c);
std::string hash_hex(std::uint64_t h);

}  // namespace raddiff
