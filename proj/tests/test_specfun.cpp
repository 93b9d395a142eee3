#include "doctest.h"
#include "oracles.hpp"

#include "raddiff/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace raddiff::specfun;

TEST_CASE("E1 matches quadrature and the standard brackets") {
  CHECK(exp_integral_e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-10));
  for (double x : {1e-6, 0.01, 0.3, 0.999, 1.0, 1.001, 2.5, 10.0, 40.0, 200.0}) {
    CHECK(exp_integral_e1(x) == doctest::Approx(oracle::e1(x)).epsilon(1e-12));
  }
  const double x = 10.0;
  CHECK(exp_integral_e1(x) > std::exp(-x) / (x + 1.0));
  CHECK(exp_integral_e1(x) < std::exp(-x) / x);
  CHECK(exp_integral_e1(1e-8) > 17.0);
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("E2 relation") {
  for (double x : {0.01, 0.5, 1.0, 3.0, 30.0}) {
    CHECK(exp_integral_e2(x) == doctest::Approx(std::exp(-x) - x * oracle::e1(x)).epsilon(1e-11));
  }
  CHECK(exp_integral_e2(1.0) == doctest::Approx(0.148495506775922).epsilon(1e-12));
  CHECK(exp_integral_e2(0.0) == 1.0);
}

TEST_CASE("K is even, positive and inside its envelope") {
  CHECK(kernel_K(1.0) == doctest::Approx(0.1096919672).epsilon(1e-10));
  CHECK(kernel_K(-1.0) == kernel_K(1.0));
  CHECK_THROWS_AS(kernel_K(0.0), std::domain_error);
  for (double x : {0.01, 0.1, 1.0, 5.0}) {
    const double k = kernel_K(x);
    CHECK(k >= 0.25 * std::exp(-x) * std::log1p(2.0 / x));
    CHECK(k <= 0.5 * std::exp(-x) * std::log1p(1.0 / x));
  }
}

TEST_CASE("Fourier symbol") {
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(kernel_fourier(0.0) == doctest::Approx(inv).epsilon(1e-15));
  CHECK(kernel_fourier(1.0) == doctest::Approx(0.3133285).epsilon(1e-7));
  CHECK(kernel_fourier(-2.0) == kernel_fourier(2.0));
  CHECK(std::abs(kernel_fourier(3.0) - oracle::kernel_cosine_transform(3.0)) < 1e-6);
  CHECK(std::abs(kernel_fourier(1e-5) - inv * std::atan(1e-5) / 1e-5) < 1e-16);
}

TEST_CASE("tail, head and moment closed forms") {
  CHECK(tail_from(1.0) == doctest::Approx(0.0742476).epsilon(1e-6));
  CHECK(head_from(1.0) == doctest::Approx(0.9257524).epsilon(1e-7));
  CHECK(tail_from(1e-14) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(head_from(30.0) > 1.0 - 1e-12);
  for (double x : {0.1, 1.0, 5.0}) {
    CHECK(tail_from(x) + head_from(x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tail_from(x) == doctest::Approx(oracle::kernel_moment(0, x, INFINITY)).epsilon(1e-11));
    CHECK(first_moment_tail(x) == doctest::Approx(oracle::kernel_moment(1, x, INFINITY)).epsilon(1e-10));
    CHECK(second_moment_tail(x) == doctest::Approx(oracle::kernel_moment(2, x, INFINITY)).epsilon(1e-10));
    // the first moment over (-x, inf) equals the one over (x, inf) by oddness
    CHECK(first_moment_tail(x) == doctest::Approx(oracle::kernel_moment(1, -x, INFINITY)).epsilon(1e-10));
  }
  CHECK(first_moment_tail(0.0) == 0.25);
  CHECK(second_moment_tail(0.0) == doctest::Approx(1.0 / 3.0));
  CHECK(tail_from(1.0) == doctest::Approx(std::exp(-1.0) / 2.0 - kernel_K(1.0)).epsilon(1e-14));
  CHECK(first_moment_tail(2.0) ==
        doctest::Approx(2.0 * std::exp(-2.0) / 4.0 + std::exp(-2.0) / 4.0 - 2.0 * kernel_K(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(tail_from(0.0), std::domain_error);
}

TEST_CASE("interval moments across the singularity") {
  const double cases[][2] = {{-1.0, 2.0}, {-0.3, 0.0}, {0.0, 0.7}, {-5.0, -0.2}, {0.25, 0.5}, {-1e-3, 1e-3}};
  for (const auto& c : cases) {
    for (int k = 0; k <= 2; ++k) {
      CHECK(kernel_moment(k, c[0], c[1]) == doctest::Approx(oracle::kernel_moment(k, c[0], c[1])).epsilon(1e-11));
    }
  }
  CHECK(kernel_moment(0, -INFINITY, INFINITY) == doctest::Approx(1.0));
  CHECK(kernel_moment(1, 2.0, 2.0) == 0.0);
}

TEST_CASE("total and L2 mass") {
  CHECK(2.0 * oracle::kernel_moment(0, 0.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-10));
  const double l2 = 2.0 * oracle::integrate([](double s) { const double k = kernel_K(s); return k * k; }, 0.0, INFINITY);
  CHECK(std::abs(l2 - std::log(2.0)) < 1e-8);
}

TEST_CASE("three-dimensional kernel") {
  CHECK(kernel_eps_const(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0) / (4.0 * std::numbers::pi)).epsilon(1e-15));
  for (double alpha : {0.5, 2.0}) {
    for (double eps : {0.1, 1.0}) {
      for (double r : {0.01, 0.3, 2.0}) {
        const double scaled = kernel_eps_const(alpha, eps, r) * std::pow(eps / alpha, 3);
        CHECK(scaled == doctest::Approx(kernel_eps_const(1.0, 1.0, alpha * r / eps)).epsilon(1e-13));
        // radial integral of 4 pi s^2 K over [0, r]
        const double mass = oracle::integrate(
            [&](double s) {
              if (s < 1e-100) return alpha / eps;
              return 4.0 * std::numbers::pi * s * s * kernel_eps_const(alpha, eps, s);
            }, 0.0, r);
        CHECK(kernel_eps_ball_mass(alpha, eps, r) == doctest::Approx(mass).epsilon(1e-11));
      }
    }
  }
  CHECK(kernel_eps_ball_mass(1.0, 1.0, 1e3) == 1.0);
  CHECK_THROWS_AS(kernel_eps_const(1.0, 1.0, 0.0), std::domain_error);
}
