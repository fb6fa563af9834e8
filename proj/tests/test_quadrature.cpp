#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbvp/quadrature.hpp"

using namespace sbvp;

namespace {
constexpr double kTwoPiOverSqrt3 = 3.6275987284684357;  // 2*pi/sqrt(3)
}

TEST_CASE("grading 1 closed grid is the uniform trapezoid rule") {
  Grid g = graded_grid(0.0, 1.0, 8, 1.0, /*open=*/false);
  REQUIRE(g.size() == 17);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g.nodes[i] == doctest::Approx(i / 16.0).epsilon(1e-15));
  CHECK(g.weights.front() == doctest::Approx(1.0 / 32.0));
  CHECK(g.weights[1] == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("open graded grid stays interior and clusters at the ends") {
  Grid g = graded_grid(0.0, 1.0, 64, 3.0, /*open=*/true);
  CHECK(g.nodes.front() > 0.0);
  CHECK(g.nodes.back() < 1.0);
  // first node is the image of the first uniform midpoint under z -> z^3
  CHECK(g.nodes.front() == doctest::Approx(std::pow(0.5 / 64, 3.0) * 0.5));
  double sum = 0;
  for (double w : g.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));  // Jacobian weights
}

TEST_CASE("closed grids are exact on constants to 1e-12") {
  Grid g = graded_grid(0.25, 2.0, 32, 4.0, /*open=*/false);
  CHECK(integrate([](double) { return 1.0; }, g) ==
        doctest::Approx(1.75).epsilon(1e-13));
}

TEST_CASE("closed trapezoid integrates affine functions to 1e-13") {
  Grid g = graded_grid(0.0, 1.0, 64, 4.0, /*open=*/false);
  double v = integrate([](double t) { return 3.0 * t - 1.0; }, g);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("weight-cancelling integrand") {
  // t(1-t) * 1/(t(1-t)) == 1; the open rule integrates constants to its
  // quadrature order, the refined evaluation is exact to roundoff
  Grid g = graded_grid(0.0, 1.0, 128, 4.0, /*open=*/true);
  double v = integrate([](double t) { return t * (1 - t) * (1.0 / (t * (1 - t))); }, g);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-4));
  double r = integrate_refined(
      [](double t) { return t * (1 - t) * (1.0 / (t * (1 - t))); }, 0.0, 1.0, 128, 4.0);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("beta-type endpoint singularities") {
  // grading chosen so grading*(1-p) >= 1 at each endpoint exponent p
  double b = integrate_refined(
      [](double t) { return std::pow(t, -1.0 / 3) * std::pow(1 - t, -2.0 / 3); }, 0.0,
      1.0, 2048, 3.0);
  CHECK(b == doctest::Approx(kTwoPiOverSqrt3).epsilon(1e-11));

  double p4 = integrate_refined([](double t) { return std::pow(1 - t, -0.75); }, 0.0,
                                1.0, 1024, 4.0);
  CHECK(p4 == doctest::Approx(4.0).epsilon(1e-11));

  double p43 = integrate_refined([](double t) { return std::pow(1 - t, -0.25); }, 0.0,
                                 1.0, 2048, 3.0);
  CHECK(p43 == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("doubling N shrinks the beta integral error by at least 3x") {
  auto f = [](double t) { return std::pow(t, -1.0 / 3) * std::pow(1 - t, -2.0 / 3); };
  double prev_err = -1.0;
  for (int N = 64; N <= 32768; N *= 2) {
    Grid g = graded_grid(0.0, 1.0, N, 3.0, /*open=*/true);
    double err = std::fabs(integrate(f, g) - kTwoPiOverSqrt3);
    if (prev_err > 0 && prev_err > 1e-9) CHECK(err < prev_err / 3.0);
    prev_err = err;
  }
  CHECK(prev_err < 1e-9);
}

TEST_CASE("refinement differences decrease monotonically past N=64") {
  auto f = [](double t) { return std::pow(t, -1.0 / 3) * std::pow(1 - t, -2.0 / 3); };
  double prev = 0, prev_diff = -1;
  for (int N = 64; N <= 4096; N *= 2) {
    Grid g = graded_grid(0.0, 1.0, N, 4.0, /*open=*/true);
    double v = integrate(f, g);
    if (prev != 0) {
      double diff = std::fabs(v - prev);
      if (prev_diff >= 0) CHECK(diff <= prev_diff);
      prev_diff = diff;
    }
    prev = v;
  }
}

TEST_CASE("non-finite integrand values are reported with the node") {
  Grid g = graded_grid(0.0, 1.0, 16, 1.0, /*open=*/false);
  CHECK_THROWS_AS(integrate([](double t) { return 1.0 / t; }, g), QuadratureError);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(graded_grid(0.0, 1.0, 4, 4.0, true), QuadratureError);
  CHECK_THROWS_AS(graded_grid(0.0, 1.0, 16, 0.5, true), QuadratureError);
  CHECK_THROWS_AS(graded_grid(1.0, 1.0, 16, 2.0, true), QuadratureError);
  // offsets below the double spacing near the right endpoint must be refused
  CHECK_THROWS_AS(graded_grid(0.0, 1.0, 1 << 14, 4.0, true), QuadratureError);
}

TEST_CASE("half-line tails") {
  CHECK(integrate_tail([](double t) { return std::exp(-t); }, 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(integrate_tail([](double t) { return std::exp(-t); }, 2.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  CHECK(integrate_tail([](double t) { return t * std::exp(-t); }, 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(integrate_tail([](double t) { return std::exp(-t); }, 0.0, 0.0),
                  QuadratureError);
}
