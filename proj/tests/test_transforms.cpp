#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbvp/transforms.hpp"

using namespace sbvp;

namespace {

Transform power_transform(double beta, double mu_max = 100.0) {
  // u = tau^-beta, v = 0  =>  I(z) = z^(beta+1)/(beta+1)
  return Transform::build(parse("x^(-" + std::to_string(beta) + ")"), Expr(), mu_max);
}

}  // namespace

TEST_CASE("closed forms of the power family") {
  Transform t_half = power_transform(0.5);
  CHECK(t_half.apply(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(t_half.apply(0.0) == 0.0);

  Transform t_one = power_transform(1.0);
  CHECK(t_one.apply(2.0) == doctest::Approx(2.0).epsilon(1e-9));

  Transform t_id = Transform::build(parse("1"), Expr(), 100.0);
  CHECK(t_id.apply(7.5) == doctest::Approx(7.5).epsilon(1e-12));

  Transform t_03 = power_transform(0.3);
  CHECK(t_03.apply(2.0) == doctest::Approx(std::pow(2.0, 1.3) / 1.3).epsilon(1e-9));
}

TEST_CASE("inversion") {
  Transform t_half = power_transform(0.5);
  CHECK(t_half.invert(2.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(t_half.invert(1.0) == doctest::Approx(std::pow(1.5, 2.0 / 3.0)).epsilon(1e-8));
  CHECK(t_half.invert(0.0) == 0.0);
  CHECK_THROWS_AS(t_half.invert(-1.0), TransformError);
  CHECK_THROWS_AS(t_half.invert(1e9), TransformError);
}

TEST_CASE("closed-form agreement for beta in {1/4, 1/2, 3/4, 1}") {
  for (double beta : {0.25, 0.5, 0.75, 1.0}) {
    Transform tr = power_transform(beta);
    char buf[96];
    std::snprintf(buf, sizeof buf, "x^%.17g / %.17g", beta + 1.0, beta + 1.0);
    auto rep = tr.check_closed_form(parse(buf), 100);
    CHECK_MESSAGE(rep.max_rel_dev < 1e-8, "beta=", beta, " worst at ", rep.worst_point);
  }
}

TEST_CASE("identity transform matches the reference exactly") {
  Transform tr = Transform::build(parse("1"), Expr(), 50.0);
  auto rep = tr.check_closed_form(parse("x"), 100);
  CHECK(rep.max_rel_dev < 1e-12);
}

TEST_CASE("invert is a right inverse of apply") {
  Transform tr = power_transform(0.5);
  for (int i = 0; i < 100; ++i) {
    double z = std::pow(10.0, -6.0 + 8.0 * i / 99.0);
    double w = tr.apply(z);
    double back = tr.invert(w);
    CHECK(std::fabs(back - z) <= 1e-8 * std::max(1.0, z));
  }
}

TEST_CASE("strict monotonicity on sampled pairs") {
  Transform tr = Transform::build(parse("x^(-0.5)"), parse("1 + x"), 100.0);
  double prev = -1.0;
  for (int i = 0; i < 200; ++i) {
    double z = std::pow(10.0, -8.0 + 10.0 * i / 199.0);
    double v = tr.apply(z);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("superadditivity anchor used by the derivative-bound proofs") {
  // I(z) + (z'-z)/(u(z)+v(z)) <= I(z') for z' > z. The inequality compares the
  // clamped continuation against the true integrand, so it needs u+v
  // nonincreasing (v = 0 in the worked transforms).
  struct CasePair {
    const char* u;
    const char* v;
  };
  for (CasePair c : {CasePair{"x^(-0.5)", "0"}, CasePair{"exp(-x) + 1", "1"}}) {
    Expr u = parse(c.u);
    Expr v = parse(c.v);
    Transform tr = Transform::build(u, v, 100.0);
    auto speed = [&](double z) {
      Env env;
      env.x = z;
      return u.eval(env) + v.eval(env);
    };
    for (int i = 0; i < 50; ++i) {
      double z = 0.01 + i * 0.1;
      double zp = z * 1.7 + 0.05;
      double lhs = tr.apply(z) + (zp - z) / speed(z);
      double rhs = tr.apply(zp);
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("extension produces a fresh value") {
  Transform tr = power_transform(0.5, 10.0);
  CHECK_THROWS_AS(tr.apply(50.0), TransformError);
  Transform wide = tr.extended(100.0);
  CHECK(wide.apply(50.0) ==
        doctest::Approx(std::pow(50.0, 1.5) / 1.5).epsilon(1e-8));
  CHECK(tr.mu_max() == doctest::Approx(10.0));  // original untouched
}

TEST_CASE("invalid transforms are rejected") {
  CHECK_THROWS_AS(Transform::build(parse("-1"), Expr(), 10.0), TransformError);
  CHECK_THROWS_AS(Transform::build(parse("x - 1"), Expr(), 10.0), TransformError);
}
