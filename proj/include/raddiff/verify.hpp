#pragma once

#include "raddiff/absorption.hpp"
#include "raddiff/geometry.hpp"
#include "raddiff/milne.hpp"
#include "raddiff/sources.hpp"
#include "raddiff/transport.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace raddiff::verify {

enum class Variant { Constant, Variable };

/// Constants of the interior supersolution
///   constant: Phi = |g|_1 [C3 (C1 - |x|^2) + C2 psi]
///   variable: Phi = |g|_1 C3 [(e^{lambda D} + C1 - e^{lambda x1}) + C2 psi]
/// with psi = (1 - gamma / (1 + (c0 d / eps)^2)) ^ (1 - gamma / (1 + (c0 mu R / eps)^2))
/// (c0 = 1 in the constant variant) and x1 measured from the domain's lowest x.
struct SupersolutionParams {
  Variant variant = Variant::Constant;
  double mu = 0.75;
  double gamma = 0.0;
  double C1 = 0.0;
  double C2 = 1.0;
  double C3 = 1.0;
  double lambda = 1.0;
  double R = 1.0;   ///< minimal curvature radius
  double D = 2.0;   ///< diameter
  double c0 = 1.0;  ///< absorption bounds
  double c1 = 1.0;
  double g_norm1 = 1.0;
  double x1_origin = 0.0;

  /// |g|_1 (2 C3 C1 + C2) or |g|_1 C3 (e^{lambda D} + C1 + C2); bounds Phi for every eps.
  [[nodiscard]] double uniform_bound() const;
  /// mu R / 2 > 2 eps ln(1/eps) / c0 and eps < R mu^3 / 2.
  [[nodiscard]] bool within_window(double eps) const;
  void validate() const;
};

/// Closed-form starting point: C1 from the action of K on quadratics (constant) or 0,
/// gamma = gamma_fraction * nu / 2 with nu = int_{-inf}^{-c1 M} K, M = 1/mu^2,
/// scaled by c0/c1 in the variable case. C2 = C3 = 1 until calibrated.
SupersolutionParams recipe(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g,
                           Variant variant, double mu = 0.75, double gamma_fraction = 0.9, double lambda = 1.0);

double psi(const SupersolutionParams& p, double eps, double depth);
double phi_eps(const Vec3& x, const SupersolutionParams& p, double eps, const ConvexDomain& domain);

struct ProbeMargin {
  Vec3 x;
  double depth = 0.0;
  double L_phi = 0.0;   ///< L(Phi)(x) by the transport quadrature
  double target = 0.0;  ///< |g|_1 e^{-c0 d / eps}
  double margin = 0.0;  ///< L_phi - target
};

struct MarginReport {
  double eps = 0.0;
  bool within_window = false;
  std::vector<ProbeMargin> probes;
  double min_margin = 0.0;
  double min_relative = 0.0;  ///< min margin / target
  std::size_t argmin = 0;
};

/// L(Phi) - |g|_1 e^{-c0 d / eps} at the probes. Report only.
MarginReport check_supersolution(const SupersolutionParams& p, const transport::TransportOperator& op,
                                 std::span<const Vec3> probes);
MarginReport check_supersolution(const SupersolutionParams& p, double eps, const ConvexDomain& domain,
                                 const AbsorptionField& alpha, std::span<const Vec3> probes);

/// Probes at depths eps * {1/20, 1/4, 1/2, 1, 2, 4, 8} and on a uniform
/// depth grid to the center, along `directions` Fibonacci directions.
std::vector<Vec3> layer_probes(const ConvexDomain& domain, double eps, int directions = 6);

/// Fills C2, C3 (and C1 for the variable variant) from the lower bounds of
/// L(psi), L(quadratic or exponential part) and L(1) measured at layer probes
/// of every operator inside the eps window (the smallest eps if none is),
/// following the proof's bookkeeping. Throws std::runtime_error when psi or
/// the exponential part has the wrong sign where the proof needs it.
SupersolutionParams calibrate(SupersolutionParams p, std::span<const std::shared_ptr<const transport::TransportOperator>> ops);

/// calibrate over a small grid of (mu, gamma fraction, lambda) and keep the
/// largest worst relative margin over the windowed operators.
SupersolutionParams search(const ConvexDomain& domain, const AbsorptionField& alpha, const AngularSource& g,
                           Variant variant, std::span<const std::shared_ptr<const transport::TransportOperator>> ops);

struct PositivityReport {
  int trials = 0;
  int failures = 0;
  double min_value = 0.0;  ///< smallest solution component over all trials
  std::string worst;       ///< description of the worst offending source

  [[nodiscard]] bool pass() const { return failures == 0; }
};

/// Random nonnegative sources (30 % zeros, otherwise uniform on [0, 1]) from
/// a seeded generator; a trial fails when the solution dips below -1e-10 of
/// its scale or the solver rejects it. flip_sign negates every source.
PositivityReport positivity_harness(const milne::MilneOperator& op, int trials, std::uint64_t seed,
                                    bool flip_sign = false);
PositivityReport positivity_harness(const std::shared_ptr<const transport::TransportOperator>& op, int trials,
                                    std::uint64_t seed, bool flip_sign = false);

/// Row masses near 1 are not representable, so sub-unity is witnessed by the
/// leak 1 - mass computed directly, plus the defect of mass + leak = 1.
struct RowSignAudit {
  double min_weight = 0.0;  ///< smallest off-diagonal quadrature weight
  double max_mass = 0.0;    ///< largest row mass
  double min_leak = 0.0;
  double max_defect = 0.0;  ///< max |sum_j K_ij + leak_i - 1|
  [[nodiscard]] bool ok() const { return min_weight >= 0.0 && min_leak > 0.0 && max_defect <= 1e-13; }
};

RowSignAudit row_sign_audit(const transport::TransportOperator& op);

}  // namespace raddiff::verify
