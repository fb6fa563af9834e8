#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbvp/kernels.hpp"
#include "sbvp/quadrature.hpp"

using namespace sbvp;
using namespace sbvp::kernels;

namespace {

BoundarySpec three_point_spec(double alpha, double eta) {
  BoundarySpec bc;
  bc.kind = BoundarySpec::Kind::ThreePoint;
  bc.alpha = alpha;
  bc.eta = eta;
  return bc;
}

BoundarySpec four_point_spec(double a, double b, double xi, double eta) {
  BoundarySpec bc;
  bc.kind = BoundarySpec::Kind::FourPointCoupled;
  bc.alpha = a;
  bc.beta = b;
  bc.xi = xi;
  bc.eta = eta;
  return bc;
}

}  // namespace

TEST_CASE("three-point kernel spot values") {
  const double a = 2.0, eta = 1.0 / 3.0;
  for (double s : {0.1, 0.4, 0.9}) CHECK(three_point(0.0, s, a, eta) == 0.0);
  CHECK(three_point(0.5, 0.5, a, eta) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(three_point(0.5, 0.2, a, eta) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("truncated three-point kernel spot values") {
  const double a = 2.0, eta = 1.0 / 3.0;
  const long n = 6;
  for (double s : {0.2, 0.5, 0.8})
    CHECK(three_point_truncated(1.0 / n, s, a, eta, n) == doctest::Approx(0.0));
  CHECK(three_point_truncated(0.5, 0.5, a, eta, n) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("four-point kernel spot values") {
  const double al = 1, be = 1, xi = 0.5, eta = 0.5;
  CHECK(four_point_F(0.25, 0.5, al, be, xi, eta) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(four_point_F(0.5, 0.25, al, be, xi, eta) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(four_point_G(0.5, 0.25, al, be, xi, eta) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("two-point kernels") {
  BoundarySpec dn;
  dn.kind = BoundarySpec::Kind::DirichletNeumann;
  CHECK(two_point(0.3, 0.7, dn) == 0.3);
  CHECK(two_point(0.7, 0.3, dn) == 0.3);

  BoundarySpec rb;
  rb.kind = BoundarySpec::Kind::RobinNeumann;
  rb.a1 = 1;
  rb.b1 = 1;
  for (double s : {0.2, 0.9}) CHECK(two_point(0.0, s, rb) == doctest::Approx(1.0));
  rb.b1 = 2;
  CHECK(two_point(0.5, 0.25, rb) == doctest::Approx(2.25));

  BoundarySpec dd;
  dd.kind = BoundarySpec::Kind::DirichletDirichlet;
  CHECK(two_point(0.75, 0.25, dd) == doctest::Approx(0.25 * 0.25));
}

TEST_CASE("two-point kernels are symmetric") {
  for (auto kind : {BoundarySpec::Kind::DirichletNeumann,
                    BoundarySpec::Kind::RobinNeumann,
                    BoundarySpec::Kind::DirichletDirichlet}) {
    BoundarySpec bc;
    bc.kind = kind;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        double t = i / 20.0, s = j / 20.0;
        CHECK(two_point(t, s, bc) == two_point(s, t, bc));
      }
  }
}

TEST_CASE("kernel t-derivatives") {
  BoundarySpec dn;
  dn.kind = BoundarySpec::Kind::DirichletNeumann;
  CHECK(kernel_dt(0.3, 0.7, dn) == 1.0);
  CHECK(kernel_dt(0.7, 0.3, dn) == 0.0);
  CHECK_THROWS_AS(kernel_dt(0.5, 0.5, dn), KernelError);
  CHECK(kernel_dt_avg(0.5, 0.5, dn) == 0.5);

  CHECK(three_point_dt(0.2, 0.5, 2.0, 1.0 / 3.0) == doctest::Approx(1.5));

  BoundarySpec rb;
  rb.kind = BoundarySpec::Kind::RobinNeumann;
  CHECK(kernel_dt(0.3, 0.7, rb) == 1.0);
}

TEST_CASE("bound constants from the closed forms") {
  auto kb = bounds(three_point_spec(2.0, 1.0 / 3.0));
  CHECK(kb.mu == doctest::Approx(6.0));
  CHECK(kb.nu == doctest::Approx(1.0));
  CHECK(kb.nu_window_lo == doctest::Approx(1.0 / 3.0));
  CHECK(kb.nu_window_hi == 1.0);

  auto fb = bounds(four_point_spec(1, 1, 0.5, 0.5));
  CHECK(fb.mu == doctest::Approx(4.0 / 3.0));
  CHECK(fb.nu == doctest::Approx(1.0 / 3.0));

  BoundarySpec dd;
  dd.kind = BoundarySpec::Kind::DirichletDirichlet;
  CHECK_THROWS_AS(bounds(dd), KernelError);

  // lower envelope never exceeds the upper one
  for (auto spec : {three_point_spec(2.0, 1.0 / 3.0), three_point_spec(0.5, 0.7),
                    four_point_spec(0.5, 3.0, 0.25, 0.5)}) {
    auto b = bounds(spec);
    CHECK(b.nu <= b.mu);
    CHECK(b.nu > 0.0);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(three_point_spec(2.0, 0.6).validate(), KernelError);
  CHECK_NOTHROW(three_point_spec(2.0, 1.0 / 3.0).validate());
  CHECK_THROWS_AS(four_point_spec(2.0, 2.0, 0.9, 0.9).validate(), KernelError);
  BoundarySpec tr = three_point_spec(2.0, 1.0 / 3.0);
  tr.kind = BoundarySpec::Kind::ThreePointTruncated;
  tr.n = 2;
  CHECK_THROWS_AS(tr.validate(), KernelError);
  tr.n = 4;
  CHECK_NOTHROW(tr.validate());
}

namespace {

// Samples K over an m x m grid and checks the envelope inequalities with
// slack tolerance 1e-12.
template <typename K>
void envelope_suite(K&& kval, const KernelBounds& kb, double lo, double hi, int m,
                    bool lower_everywhere_weighted) {
  const double slack = 1e-12;
  for (int i = 0; i < m; ++i) {
    double t = lo + (hi - lo) * i / (m - 1);
    for (int j = 0; j < m; ++j) {
      double s = lo + (hi - lo) * j / (m - 1);
      double v = kval(t, s);
      double su = (s - lo) * (hi - s);
      REQUIRE(v >= -slack);                      // nonnegativity
      REQUIRE(v <= kb.mu * su + slack);          // upper envelope
      if (t >= kb.nu_window_lo && t <= kb.nu_window_hi)
        REQUIRE(v >= kb.nu * su - slack);        // lower envelope on the window
      if (lower_everywhere_weighted)
        REQUIRE(v >= kb.nu * (t - lo) * (hi - t) * su - slack);
    }
  }
}

}  // namespace

TEST_CASE("three-point envelope suite on a 201x201 grid") {
  auto spec = three_point_spec(2.0, 1.0 / 3.0);
  auto kb = bounds(spec);
  envelope_suite([&](double t, double s) { return three_point(t, s, 2.0, 1.0 / 3.0); },
                 kb, 0.0, 1.0, 201, /*lower_everywhere_weighted=*/true);
}

TEST_CASE("truncated envelope suite for n in {n0, n0+3, 2*n0}") {
  BoundarySpec tr = three_point_spec(2.0, 1.0 / 3.0);
  tr.kind = BoundarySpec::Kind::ThreePointTruncated;
  long n0 = tr.min_truncation_index();
  for (long n : {n0, n0 + 3, 2 * n0}) {
    tr.n = n;
    auto kb = bounds(tr);
    double l = 1.0 / static_cast<double>(n);
    envelope_suite(
        [&](double t, double s) { return three_point_truncated(t, s, 2.0, 1.0 / 3.0, n); },
        kb, l, 1.0 - l, 201, /*lower_everywhere_weighted=*/false);
  }
}

TEST_CASE("four-point envelope suites for both parameter sets") {
  struct Params {
    double a, b, xi, eta;
  };
  for (Params p : {Params{1, 1, 0.5, 0.5}, Params{0.5, 3.0, 0.25, 0.5}}) {
    const double den = 1.0 - p.a * p.b * p.xi * p.eta;
    const double slack = 1e-12;
    const int m = 201;
    // per-kernel envelopes: lem5.4, rem2.5 (upper) and lem2.6, rem2.7 (lower)
    struct Case {
      double mu, nu, window_lo;
      double (*val)(double, double, double, double, double, double);
      double a, b, xi, eta;
    };
    auto F = [](double t, double s, double a, double b, double xi, double eta) {
      return four_point_F(t, s, a, b, xi, eta);
    };
    auto G = [](double t, double s, double a, double b, double xi, double eta) {
      return four_point_G(t, s, a, b, xi, eta);
    };
    Case cases[] = {
        {std::max(1.0, p.a * p.b * p.xi) / den,
         std::min(1.0, p.a * p.b * p.xi) * std::min(p.eta, 1 - p.eta) / den, p.eta, F,
         p.a, p.b, p.xi, p.eta},
        {p.a / den, p.a * p.xi * std::min(p.xi, 1 - p.xi) / den, p.xi, G, p.a, p.b,
         p.xi, p.eta},
        // mirrored pair: swap (alpha,xi) <-> (beta,eta)
        {std::max(1.0, p.a * p.b * p.eta) / den,
         std::min(1.0, p.a * p.b * p.eta) * std::min(p.xi, 1 - p.xi) / den, p.xi, F,
         p.b, p.a, p.eta, p.xi},
        {p.b / den, p.b * p.eta * std::min(p.eta, 1 - p.eta) / den, p.eta, G, p.b,
         p.a, p.eta, p.xi},
    };
    for (const Case& c : cases) {
      for (int i = 0; i < m; ++i) {
        double t = i / (m - 1.0);
        for (int j = 0; j < m; ++j) {
          double s = j / (m - 1.0);
          double v = c.val(t, s, c.a, c.b, c.xi, c.eta);
          REQUIRE(v >= -slack);
          REQUIRE(v <= c.mu * s * (1 - s) + slack);
          if (t >= c.window_lo) REQUIRE(v >= c.nu * s * (1 - s) - slack);
        }
      }
    }
    // combined envelope of rem2.8 over all four kernels
    auto kb = bounds(four_point_spec(p.a, p.b, p.xi, p.eta));
    for (int i = 0; i < m; ++i) {
      double t = i / (m - 1.0);
      for (int j = 0; j < m; ++j) {
        double s = j / (m - 1.0);
        double su = s * (1 - s);
        double vals[4] = {four_point_F(t, s, p.a, p.b, p.xi, p.eta),
                          four_point_G(t, s, p.a, p.b, p.xi, p.eta),
                          four_point_F(t, s, p.b, p.a, p.eta, p.xi),
                          four_point_G(t, s, p.b, p.a, p.eta, p.xi)};
        for (double v : vals) {
          REQUIRE(v <= kb.mu * su + slack);
          if (t >= kb.nu_window_lo) REQUIRE(v >= kb.nu * su - slack);
        }
      }
    }
  }
}

TEST_CASE("green identity: kernel quadrature reproduces the analytic solutions") {
  // -u'' = 1 with the three-point conditions has u = 7t/6 - t^2/2
  Grid g = graded_grid(0.0, 1.0, 1000, 1.0, /*open=*/false);
  REQUIRE(g.size() == 2001);
  double max_err = 0.0;
  for (double t : {0.0, 0.1, 0.25, 0.5, 1.0 / 3.0, 0.75, 0.9, 1.0}) {
    double u = integrate([&](double s) { return three_point(t, s, 2.0, 1.0 / 3.0); }, g);
    max_err = std::max(max_err, std::fabs(u - (7.0 * t / 6.0 - t * t / 2.0)));
  }
  CHECK(max_err < 1e-6);

  // nonlocal identity u(1) = 2 u(1/3) holds at quadrature level
  double u1 = integrate([&](double s) { return three_point(1.0, s, 2.0, 1.0 / 3.0); }, g);
  double ue = integrate(
      [&](double s) { return three_point(1.0 / 3.0, s, 2.0, 1.0 / 3.0); }, g);
  CHECK(std::fabs(u1 - 2.0 * ue) < 1e-10);

  // -u'' = 1, u(0)=0, u'(1)=0 has u = t - t^2/2
  BoundarySpec dn;
  dn.kind = BoundarySpec::Kind::DirichletNeumann;
  for (double t : {0.0, 0.3, 0.5, 1.0}) {
    double u = integrate([&](double s) { return two_point(t, s, dn); }, g);
    CHECK(u == doctest::Approx(t - t * t / 2.0).epsilon(1e-8));
  }
}

TEST_CASE("green identity with a smooth load and second differences") {
  // u(t) = int K(t,s) sin(pi s) ds solves -u'' = sin(pi t) with the BCs
  const double pi = 3.14159265358979323846;
  Grid g = graded_grid(0.0, 1.0, 1000, 1.0, /*open=*/false);
  auto z = [&](double s) { return std::sin(pi * s); };

  auto check_bc_and_ode = [&](auto&& kv, auto&& bc_check) {
    const int m = 41;
    std::vector<double> u(m);
    double h = 1.0 / (m - 1);
    for (int i = 0; i < m; ++i) {
      double t = i * h;
      u[i] = integrate([&](double s) { return kv(t, s) * z(s); }, g);
    }
    for (int i = 1; i + 1 < m; ++i) {
      double dd = (u[i - 1] - 2 * u[i] + u[i + 1]) / (h * h);
      CHECK(std::fabs(dd + z(i * h)) < 1e-3);  // h^2 ~ 6e-4
    }
    bc_check(u, h);
  };

  check_bc_and_ode(
      [&](double t, double s) { return three_point(t, s, 2.0, 1.0 / 3.0); },
      [&](const std::vector<double>& u, double) {
        CHECK(std::fabs(u.front()) < 1e-8);
      });
}
