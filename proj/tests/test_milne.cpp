#include "doctest.h"

#include "raddiff/milne.hpp"
#include "raddiff/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace raddiff;
using namespace raddiff::milne;

namespace {

constexpr double kPi = std::numbers::pi;

const MilneOperator& default_operator() {
  static const MilneOperator op(make_grid());
  return op;
}

// L(1)(x) and L(Id)(x) on the half line in closed form.
double l_one(double x) { return x == 0.0 ? 0.5 : std::exp(-x) / 2.0 - x * specfun::kernel_K(x); }
double l_id(double x) {
  if (x == 0.0) return -0.25;
  return x / 4.0 * std::exp(-x) - std::exp(-x) / 4.0 - x * x / 2.0 * specfun::kernel_K(x);
}

std::vector<double> sample(const HalfLineGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> out;
  for (double y : grid.y) out.push_back(f(y));
  return out;
}

}  // namespace

TEST_CASE("grid construction and validation") {
  const auto grid = make_grid();
  CHECK(grid.y.front() == 0.0);
  CHECK(grid.y.back() == 40.0);
  CHECK(grid.y[1] <= 1e-3);
  CHECK(grid.size() > 1000);
  CHECK(grid.size() < 1400);
  const auto fine = refine(grid);
  CHECK(fine.size() == 2 * grid.size() - 1);
  CHECK_THROWS_AS(make_grid({40.0, 1e-2, 1.05, 0.035}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({40.0, 1e-3, 1.5, 0.5}), std::invalid_argument);
}

TEST_CASE("operator reproduces L(1) and L(Id)") {
  const auto& op = default_operator();
  const auto& y = op.grid().y;
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(op.size());
  Eigen::VectorXd id(op.size());
  for (std::size_t i = 0; i < y.size(); ++i) id[i] = y[i];
  const Eigen::VectorXd a1 = op.apply(one);
  const Eigen::VectorXd ay = op.apply(id);
  double err1 = 0.0, erry = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    err1 = std::max(err1, std::abs(a1[i] - (1.0 - op.mass()[i])));
    err1 = std::max(err1, std::abs(a1[i] - l_one(y[i])));
    // the constant closure beyond y_max is felt within a few kernel lengths of it
    if (y[i] <= 20.0) erry = std::max(erry, std::abs(ay[i] - l_id(y[i])));
  }
  CHECK(err1 < 1e-10);
  CHECK(erry < 1e-8);
  const auto audit = op.audit();
  CHECK(audit.ok());
  CHECK(audit.max_offdiagonal <= 0.0);
  CHECK(audit.min_row_sum > 0.0);
}

TEST_CASE("homogeneous and equilibrium solves") {
  const auto& op = default_operator();
  const std::vector<double> zero(op.size(), 0.0);
  const auto p0 = solve_milne(op, zero);
  CHECK(p0.u.cwiseAbs().maxCoeff() == 0.0);

  const auto g = AngularSource::isotropic(1.0);
  const PlanarSource G(g, Vec3::UnitZ());
  const auto gs = G.sample(op.grid().y);
  const auto p = solve_milne(op, gs);
  CHECK((p.u.array() - 4 * kPi).abs().maxCoeff() < 1e-8);
  CHECK(p.residual < 1e-8);
  const auto lim = milne_limit(op, p, [&](double x) { return G(x); });
  CHECK(lim.u_inf == doctest::Approx(4 * kPi).epsilon(1e-4));
  CHECK(lim.u_inf_moment == doctest::Approx(4 * kPi).epsilon(1e-4));
  CHECK(std::isnan(lim.decay_rate));
  CHECK_FALSE(lim.flagged);
}

TEST_CASE("exponential source: decay, estimators and Picard cross-check") {
  const auto& op = default_operator();
  const auto expo = [](double y) { return std::exp(-y); };
  const auto p = solve_milne(op, sample(op.grid(), expo));
  CHECK(p.u.minCoeff() >= 0.0);
  const auto lim = milne_limit(op, p, expo);
  MESSAGE("u_inf=" << lim.u_inf << " moment=" << lim.u_inf_moment << " gap=" << lim.relative_gap
                   << " rate=" << lim.decay_rate);
  CHECK(lim.decay_rate <= -0.45);
  CHECK(lim.relative_gap < 1e-3);

  // short half line so the monotone iteration converges in a few thousand steps
  const MilneOperator small(make_grid({8.0, 1e-3, 1.1, 0.1}));
  SolveOptions opts;
  opts.picard_steps = 20000;
  const auto ps = solve_milne(small, sample(small.grid(), expo), opts);
  CHECK(ps.picard.monotone);
  CHECK(ps.picard.converged);
  CHECK(ps.picard.gap <= 1e-6);
  CHECK(ps.picard.contraction < 1.0);
}

TEST_CASE("discrete maximum principle and comparison") {
  const auto& op = default_operator();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd rhs(op.size());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = unif(rng) * std::exp(-unif(rng) * op.grid().y[i]);
    worst = std::min(worst, op.solve(rhs).minCoeff());
  }
  CHECK(worst >= -1e-10);
  // sign-flipped sources are caught
  const Eigen::VectorXd neg = -op.solve(Eigen::VectorXd::Ones(op.size()));
  CHECK(neg.minCoeff() < 0.0);

  // a source with norm1 <= B is dominated by the solve for B e^{-y}
  const auto cone = AngularSource::cone(Vec3(0.3, 0.0, -1.0), 0.8, 2.0);
  const double B = cone.norm1();
  const PlanarSource G(cone, Vec3::UnitZ());
  const auto u = solve_milne(op, G.sample(op.grid().y)).u;
  const auto ub = solve_milne(op, sample(op.grid(), [B](double y) { return B * std::exp(-y); })).u;
  CHECK((ub - u).minCoeff() >= -1e-10);
}

TEST_CASE("boundary temperature map") {
  const auto& op = default_operator();
  const auto ball = ConvexDomain::ball(1.0);
  const auto alpha = AbsorptionField::constant(1.0);
  const auto iso = boundary_temperature_map(ball, AngularSource::isotropic(1.0), alpha, 6, op);
  for (const auto& b : iso) CHECK(b.u_inf == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(lipschitz_quotient(iso) < 1e-5);

  const Vec3 axis = Vec3(0.0, 0.0, -1.0);
  const auto cone = AngularSource::cone(axis, 0.9, 1.0);
  const auto coarse = boundary_temperature_map(ball, cone, alpha, 24, op);
  const auto finer = boundary_temperature_map(ball, cone, alpha, 48, op);
  std::size_t best = 0;
  for (std::size_t k = 0; k < finer.size(); ++k) {
    if (finer[k].u_inf > finer[best].u_inf) best = k;
    CHECK(finer[k].u_inf >= 0.0);
  }
  // maximal where the outward normal opposes the cone axis (the top of the ball)
  CHECK(finer[best].sample.normal.dot(axis) < -0.9);
  const double l1 = lipschitz_quotient(coarse);
  const double l2 = lipschitz_quotient(finer);
  MESSAGE("Lipschitz quotients " << l1 << " " << l2);
  CHECK(l2 < 2.0 * l1 + 1e-12);
}

TEST_CASE("temperature from u") {
  CHECK(temperature_from_u(4 * kPi, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(temperature_from_u(0.0, 1.0) == 0.0);
  const double sigma = 5.670374419e-8;
  const double T = 1234.5;
  CHECK(temperature_from_u(4 * kPi * sigma * std::pow(T, 4), sigma) == doctest::Approx(T).epsilon(1e-14));
}
