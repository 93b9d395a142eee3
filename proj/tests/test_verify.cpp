#include "doctest.h"

#include "raddiff/verify.hpp"

#include <algorithm>
#include <cmath>

using namespace raddiff;
using namespace raddiff::verify;

namespace {

using OpList = std::vector<std::shared_ptr<const transport::TransportOperator>>;

const ConvexDomain& ball() {
  static const ConvexDomain d = ConvexDomain::ball(1.0);
  return d;
}

const OpList& constant_ops() {
  static const OpList ops = [] {
    OpList out;
    for (double e : {0.1, 0.05}) out.push_back(transport::make_operator(ball(), AbsorptionField::constant(1.0), e));
    return out;
  }();
  return ops;
}

const SupersolutionParams& constant_params() {
  static const SupersolutionParams p =
      search(ball(), AbsorptionField::constant(1.0), AngularSource::isotropic(1.0), Variant::Constant, constant_ops());
  return p;
}

}  // namespace

TEST_CASE("supersolution parameters validate and window") {
  SupersolutionParams p = recipe(ball(), AbsorptionField::constant(1.0), AngularSource::isotropic(1.0),
                                 Variant::Constant);
  CHECK(p.gamma > 0.0);
  CHECK(p.gamma < 1.0 / 3.0);
  CHECK(p.C1 == doctest::Approx(2.0 + 8.0 + 8.0 + 4.0));
  CHECK_NOTHROW(p.validate());

  // mu = 0.75, R = 1: the log condition fails at 0.1 and holds at 0.05
  CHECK_FALSE(p.within_window(0.1));
  CHECK(p.within_window(0.05));
  CHECK_FALSE(p.within_window(0.0));
  CHECK_FALSE(p.within_window(1.5));

  SupersolutionParams bad = p;
  bad.mu = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.gamma = 0.4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.C2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(recipe(ball(), AbsorptionField::constant(1.0), AngularSource::isotropic(1.0), Variant::Constant,
                         0.75, 1.0),
                  std::invalid_argument);
}

TEST_CASE("psi is continuous at mu R and bounded") {
  const SupersolutionParams& p = constant_params();
  for (double eps : {0.2, 0.05, 0.01}) {
    const double d = p.mu * p.R;
    CHECK(std::abs(psi(p, eps, d * (1.0 - 1e-13)) - psi(p, eps, d * (1.0 + 1e-13))) <= 1e-12);
    double prev = psi(p, eps, 0.0);
    CHECK(prev == doctest::Approx(1.0 - p.gamma));
    for (int k = 1; k <= 50; ++k) {
      const double v = psi(p, eps, k * 0.02);
      CHECK(v >= prev - 1e-15);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("constant variant: positive margins, domination and uniform bound") {
  const SupersolutionParams& p = constant_params();
  const AngularSource g = AngularSource::isotropic(1.0);
  CHECK(p.C2 > 0.0);
  CHECK(p.C3 > 0.0);
  const double bound = p.uniform_bound();
  CHECK(std::isfinite(bound));

  for (const auto& op : constant_ops()) {
    const auto probes = layer_probes(ball(), op->eps());
    const MarginReport rep = check_supersolution(p, *op, probes);
    CHECK(rep.within_window == p.within_window(op->eps()));
    CHECK(rep.probes.size() == probes.size());
    INFO("eps " << op->eps() << " worst probe depth " << rep.probes[rep.argmin].depth);
    CHECK(rep.min_margin > 0.0);

    const auto field = transport::solve_ueps(op, op->source(g));
    for (std::size_t i = 0; i < op->size(); ++i) {
      const double phi = phi_eps(op->points()[i], p, op->eps(), ball());
      CHECK(phi >= 0.0);
      CHECK(phi <= bound);
      CHECK(phi - field.u[static_cast<Eigen::Index>(i)] >= 0.0);
    }
  }
  // the bound holds for eps far below the sweep
  for (double eps : {1e-3, 1e-6}) {
    for (const auto& s : ball().fibonacci_samples(8)) {
      for (double d : {0.0, eps, 0.5}) CHECK(phi_eps(s.point - d * s.normal, p, eps, ball()) <= bound);
    }
  }
}

TEST_CASE("variable variant calibrates on a radial absorption") {
  const AbsorptionField alpha = AbsorptionField::radial({1.0, 0.0, 0.5}, Vec3::Zero(), 1.0);
  const AngularSource g = AngularSource::isotropic(1.0);
  const OpList ops{transport::make_operator(ball(), alpha, 0.05)};
  SupersolutionParams p = recipe(ball(), alpha, g, Variant::Variable);
  CHECK(p.c1 > p.c0);
  p = calibrate(p, ops);
  CHECK(p.C1 > 0.0);
  CHECK(p.C2 > 0.0);
  CHECK(p.C3 > 0.0);

  const auto probes = layer_probes(ball(), 0.05, 4);
  const MarginReport rep = check_supersolution(p, *ops[0], probes);
  CHECK(rep.min_margin > 0.0);
  const auto field = transport::solve_ueps(ops[0], ops[0]->source(g));
  double worst = 1e300;
  for (std::size_t i = 0; i < ops[0]->size(); ++i) {
    worst = std::min(worst, phi_eps(ops[0]->points()[i], p, 0.05, ball()) - field.u[static_cast<Eigen::Index>(i)]);
  }
  CHECK(worst >= 0.0);
}

TEST_CASE("layer probes stay inside and reach the boundary layer") {
  const ConvexDomain e = ConvexDomain::ellipsoid({1.0, 0.8, 0.6});
  const auto probes = layer_probes(e, 0.05, 5);
  double shallowest = 1e300;
  for (const auto& x : probes) {
    CHECK(e.signed_distance(x) > 0.0);
    shallowest = std::min(shallowest, e.signed_distance(x));
  }
  CHECK(shallowest <= 0.05 * 0.05 * 1.01);
}

TEST_CASE("positivity harness") {
  const milne::MilneOperator milne_op(milne::make_grid({20.0, 1e-3, 1.1, 0.1}));
  const PositivityReport m = positivity_harness(milne_op, 100, 7);
  CHECK(m.trials == 100);
  CHECK(m.pass());
  CHECK(m.min_value >= 0.0);
  const PositivityReport mf = positivity_harness(milne_op, 5, 7, true);
  CHECK_FALSE(mf.pass());
  CHECK_FALSE(mf.worst.empty());

  const auto op = transport::make_operator(ball(), AbsorptionField::constant(1.0), 0.1);
  const PositivityReport t = positivity_harness(op, 20, 11);
  CHECK(t.trials == 20);
  CHECK(t.pass());
  const PositivityReport tf = positivity_harness(op, 3, 11, true);
  CHECK(tf.failures == 3);
  CHECK_FALSE(tf.worst.empty());

  // same seed, same report
  CHECK(positivity_harness(milne_op, 10, 3).min_value == positivity_harness(milne_op, 10, 3).min_value);
}

TEST_CASE("row sign audit") {
  const auto op = transport::make_operator(ball(), AbsorptionField::constant(1.0), 0.1);
  const RowSignAudit a = row_sign_audit(*op);
  CHECK(a.ok());
  CHECK(a.min_weight >= 0.0);
  CHECK(a.min_leak > 0.0);
  CHECK(a.max_defect <= 1e-13);
  CHECK(a.max_mass == doctest::Approx(op->row_mass().maxCoeff()).epsilon(1e-12));

  // deep rows at small eps: the mass rounds to 1, the leak stays positive
  const auto deep = transport::make_operator(ball(), AbsorptionField::radial({1.0, 0.0, 0.5}, Vec3::Zero(), 1.0), 0.025);
  const RowSignAudit b = row_sign_audit(*deep);
  CHECK(b.ok());
  CHECK(b.min_leak < 1e-15);
}

TEST_CASE("gamma = 0 reduces to the quadratic bound 2 eps^2 in the deep interior") {
  const double eps = 0.05;
  const auto& op = *constant_ops()[1];
  SupersolutionParams p = recipe(ball(), AbsorptionField::constant(1.0), AngularSource::isotropic(1.0),
                                 Variant::Constant);
  p.gamma = 0.0;
  p.C2 = 1.0;
  p.C3 = 1.0;
  const std::vector<Vec3> probes{Vec3::Zero(), Vec3(0.2, 0.1, 0.0)};
  const MarginReport rep = check_supersolution(p, op, probes);
  for (const auto& m : rep.probes) {
    // second moment of the 3D kernel is 2 eps^2; the escape mass e^{-d/eps} is below 1e-6 here
    CHECK(m.L_phi / p.g_norm1 == doctest::Approx(2.0 * eps * eps).epsilon(0.02));
    CHECK(m.margin >= p.g_norm1 * (2.0 * eps * eps * 0.98) - m.target);
  }
}
