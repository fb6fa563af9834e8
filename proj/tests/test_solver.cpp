#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sbvp/solver.hpp"

using namespace sbvp;

namespace {

ProblemSpec dn_problem(const char* f, const char* g, const char* p = "1",
                       const char* q = "1") {
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::DirichletNeumann;
  prob.p = parse(p);
  prob.q = parse(q);
  prob.f = parse(f);
  prob.g = parse(g);
  return prob;
}

ProblemSpec truncated_three_point_example1() {
  // -x'' = (1/y + 3 y^(1/3))/(t(1-t)), -y'' = (1/x + 4x)/(t(1-t)),
  // x(0)=0, x(1)=2x(1/3)
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  prob.bc.alpha = 2.0;
  prob.bc.eta = 1.0 / 3.0;
  prob.p = parse("1/(t*(1-t))");
  prob.q = parse("1/(t*(1-t))");
  prob.f = parse("1/y + 3*y^(1/3)");
  prob.g = parse("1/x + 4*x");
  prob.regularization = Regularization::ShiftState;
  prob.singular.x = prob.singular.y = prob.singular.endpoints = true;
  return prob;
}

}  // namespace

TEST_CASE("operator image of the constant load is the analytic solution") {
  ProblemSpec prob = dn_problem("1", "1");
  Grid grid = graded_grid(0, 1, 512, 4.0, true);
  State s = State::zeros(grid.size());
  State out = apply_T(prob, grid, 1, s);
  double max_err = 0, max_derr = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.nodes[i];
    max_err = std::max(max_err, std::fabs(out.x[i] - (t - t * t / 2)));
    max_derr = std::max(max_derr, std::fabs(out.dx[i] - (1 - t)));
  }
  CHECK(max_err < 1e-8);
  CHECK(max_derr < 1e-8);
}

TEST_CASE("three-point operator with unit load hits 7t/6 - t^2/2") {
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::ThreePoint;
  prob.bc.alpha = 2.0;
  prob.bc.eta = 1.0 / 3.0;
  prob.p = parse("1");
  prob.q = parse("1");
  prob.f = parse("1");
  prob.g = parse("1");
  Grid grid = graded_grid(0, 1, 512, 4.0, true);
  State out = apply_T(prob, grid, 1, State::zeros(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.nodes[i];
    CHECK(std::fabs(out.x[i] - (7.0 * t / 6 - t * t / 2)) < 1e-8);
  }
  // value at t = 1/2 is 11/24
  nystrom::StageOperator op(prob, grid, 1);
  auto loads = op.loads_for(State::zeros(grid.size()));
  auto pv = op.eval_at(loads, 0.5);
  CHECK(pv.x == doctest::Approx(11.0 / 24.0).epsilon(1e-9));
}

TEST_CASE("zero nonlinearities map to the zero state") {
  ProblemSpec prob = dn_problem("0", "0");
  Grid grid = graded_grid(0, 1, 64, 4.0, true);
  State out = apply_T(prob, grid, 1, State::zeros(grid.size()));
  for (double v : out.x) CHECK(v == 0.0);
  for (double v : out.dy) CHECK(v == 0.0);
}

TEST_CASE("constant operator converges in two undamped iterations") {
  ProblemSpec prob = dn_problem("1", "1");
  Grid grid = graded_grid(0, 1, 64, 4.0, true);
  SolverOptions opts;
  opts.omega = 1.0;
  opts.init = SolverOptions::Init::Zero;
  SolutionPair sol = fixed_point(prob, grid, 1, State::zeros(grid.size()), opts);
  CHECK(sol.diag.converged);
  CHECK(sol.diag.stages.back().iterations <= 2);
}

TEST_CASE("declared derivative singularity without regularization surfaces a domain error") {
  ProblemSpec prob = dn_problem("d^(-0.5)", "d^(-0.5)");
  prob.singular.d = true;
  prob.regularization = Regularization::None;
  Grid grid = graded_grid(0, 1, 64, 4.0, true);
  SolverOptions opts;
  SolutionPair sol = fixed_point(prob, grid, 4, State::zeros(grid.size()), opts);
  CHECK_FALSE(sol.diag.converged);
  CHECK(sol.diag.flag.find("domain error") != std::string::npos);
}

TEST_CASE("first worked three-point pair has a clean stage fixed point at n=16") {
  ProblemSpec prob = truncated_three_point_example1();
  prob.bc.n = 16;
  Grid grid = graded_grid(1.0 / 16, 1.0 - 1.0 / 16, 256, 4.0, true);
  SolverOptions opts;
  opts.N = 256;
  SolutionPair sol = fixed_point(prob, grid, 16, State::zeros(grid.size()), opts);
  CHECK(sol.diag.converged);
  CHECK(sol.diag.fp_residual < 1e-10);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sol.x[i] > 0.0);
    CHECK(sol.y[i] > 0.0);
  }
}

TEST_CASE("trivial problem converges at the first comparison stage") {
  ProblemSpec prob = dn_problem("0", "0");
  prob.regularization = Regularization::ShiftState;
  SolverOptions opts;
  opts.N = 64;
  SolutionPair sol = solve_regularized(prob, opts);
  CHECK(sol.diag.converged);
  CHECK(sol.diag.reg_cauchy);
  CHECK(sol.diag.stage_diff == 0.0);
  for (double v : sol.x) CHECK(v == 0.0);
}

TEST_CASE("residual of the exact three-point solution") {
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::ThreePoint;
  prob.bc.alpha = 2.0;
  prob.bc.eta = 1.0 / 3.0;
  prob.p = parse("1");
  prob.q = parse("1");
  prob.f = parse("1");
  prob.g = parse("1");
  Grid grid = graded_grid(0, 1, 1000, 1.0, true);
  SolutionPair sol;
  sol.grid = grid;
  sol.diag.n_final = 1;
  sol.x.resize(grid.size());
  sol.y.resize(grid.size());
  sol.dx.resize(grid.size());
  sol.dy.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.nodes[i];
    sol.x[i] = sol.y[i] = 7.0 * t / 6 - t * t / 2;
    sol.dx[i] = sol.dy[i] = 7.0 / 6 - t;
  }
  auto rep = residual(prob, sol);
  CHECK(rep.ode_residual < 1e-6);
  CHECK(rep.bc_residual < 1e-12);
  CHECK(rep.positivity_ok);
}

TEST_CASE("residual of the exact Dirichlet-Neumann solution") {
  ProblemSpec prob = dn_problem("1", "1");
  Grid grid = graded_grid(0, 1, 1000, 1.0, true);
  SolutionPair sol;
  sol.grid = grid;
  sol.diag.n_final = 1;
  sol.x.resize(grid.size());
  sol.y.resize(grid.size());
  sol.dx.resize(grid.size());
  sol.dy.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.nodes[i];
    sol.x[i] = sol.y[i] = t - t * t / 2;
    sol.dx[i] = sol.dy[i] = 1 - t;
  }
  auto rep = residual(prob, sol);
  CHECK(rep.ode_residual < 1e-6);
  CHECK(rep.bc_residual < 1e-10);
}

TEST_CASE("residual of the zero solution under zero loads vanishes") {
  ProblemSpec prob = dn_problem("0", "0");
  Grid grid = graded_grid(0, 1, 64, 4.0, true);
  SolutionPair sol;
  sol.grid = grid;
  sol.diag.n_final = 1;
  sol.x.assign(grid.size(), 0.0);
  sol.y.assign(grid.size(), 0.0);
  sol.dx.assign(grid.size(), 0.0);
  sol.dy.assign(grid.size(), 0.0);
  auto rep = residual(prob, sol);
  CHECK(rep.ode_residual == 0.0);
  CHECK(rep.bc_residual == 0.0);
}

TEST_CASE("cone membership checks") {
  Grid grid = graded_grid(0, 1, 64, 1.0, true);
  SolutionPair sol;
  sol.grid = grid;
  auto fill = [&](auto fx, auto dfx) {
    sol.x.resize(grid.size());
    sol.y.resize(grid.size());
    sol.dx.resize(grid.size());
    sol.dy.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sol.x[i] = sol.y[i] = fx(grid.nodes[i]);
      sol.dx[i] = sol.dy[i] = dfx(grid.nodes[i]);
    }
    sol.diag.x_lo = sol.diag.y_lo = fx(0.0);
    sol.diag.x_hi = sol.diag.y_hi = fx(1.0);
    sol.diag.dx_lo = sol.diag.dy_lo = dfx(0.0);
    sol.diag.dx_hi = sol.diag.dy_hi = dfx(1.0);
  };
  BoundarySpec bc;
  bc.kind = BoundarySpec::Kind::DirichletNeumann;

  fill([](double t) { return t; }, [](double) { return 1.0; });
  CHECK(verify_cone(sol, bc, Cone::TWeighted));  // equality case

  fill([](double t) { return 1.0 - t; }, [](double) { return -1.0; });
  CHECK_FALSE(verify_cone(sol, bc, Cone::TWeighted));  // witness near t = 1

  fill([](double t) { return t * (2 - t); }, [](double t) { return 2 - 2 * t; });
  CHECK(verify_cone(sol, bc, Cone::NonnegConcave));

  fill([](double t) { return t * t; }, [](double t) { return 2 * t; });
  CHECK_FALSE(verify_cone(sol, bc, Cone::NonnegConcave));  // convex
}

TEST_CASE("worked pair solution lies in the chapter cone t(1-t)*gamma*||x||") {
  // gamma = min{1,alpha} min{eta,1-eta} / max{1,alpha} = 1/6 for alpha=2, eta=1/3
  ProblemSpec prob = truncated_three_point_example1();
  prob.bc.kind = BoundarySpec::Kind::ThreePoint;
  prob.regularization = Regularization::ShiftState;
  SolverOptions opts;
  opts.N = 128;
  opts.n_max = 64;  // a few stages are enough for the membership check
  SolutionPair sol = solve_regularized(prob, opts);
  REQUIRE(sol.diag.converged);
  CHECK(verify_cone(sol, prob.bc, Cone::TtGamma));
}

TEST_CASE("cone invariance of the stage operator on random cone members") {
  // K_n membership (nonnegative, concave) is preserved by T_n
  ProblemSpec prob = truncated_three_point_example1();
  long n = 8;
  prob.bc.n = n;
  Grid grid = graded_grid(1.0 / n, 1 - 1.0 / n, 64, 2.0, true);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> amp(0.1, 3.0);
  BoundarySpec bc = prob.bc;
  for (int rep = 0; rep < 50; ++rep) {
    // members generated through the kernel image of positive loads
    ProblemSpec gen = prob;
    double a = amp(rng), b = amp(rng);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f + %.6f*t", a, b);
    gen.f = parse(buf);
    gen.g = parse(buf);
    gen.regularization = Regularization::None;
    gen.p = parse("1");
    gen.q = parse("1");
    State member = apply_T(gen, grid, n, State::zeros(grid.size()));

    State img = apply_T(prob, grid, n, member);
    SolutionPair wrap;
    wrap.grid = grid;
    wrap.x = img.x;
    wrap.y = img.y;
    wrap.dx = img.dx;
    wrap.dy = img.dy;
    CHECK(verify_cone(wrap, bc, Cone::NonnegConcave));
  }
}

TEST_CASE("operator-solution consistency: residual drops with refinement") {
  ProblemSpec prob = dn_problem("1 + y/2", "1 + x/2");
  SolverOptions opts;
  double prev = -1;
  for (int N : {64, 128, 256}) {
    opts.N = N;
    Grid grid = graded_grid(0, 1, N, 4.0, true);
    SolutionPair sol = fixed_point(prob, grid, 1, State::zeros(grid.size()), opts);
    REQUIRE(sol.diag.converged);
    auto rep = residual(prob, sol);
    if (prev > 0) CHECK(rep.ode_residual < prev / 3.0);
    prev = rep.ode_residual;
  }
}

TEST_CASE("stage solutions of the derivative-singular chapter stay concave with dx >= 1/n") {
  // worked pair (3.1.26) with beta1 = 1/2, beta2 = 1/4
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::DirichletNeumann;
  prob.p = parse("t^(-1/3)*(1-t)^(-2/3)");
  prob.q = parse("t^(-2/3)*(1-t)^(-1/3)");
  prob.f = parse("y^(1/3)*d^(-0.5)");
  prob.g = parse("x^(2/3)*d^(-0.25)");
  prob.regularization = Regularization::RetractionBox;
  prob.singular.d = true;
  prob.singular.endpoints = true;
  SolverOptions opts;
  opts.N = 128;
  for (long n : {8L, 64L}) {
    Grid grid = graded_grid(0, 1, opts.N, opts.grading, true);
    SolutionPair sol = fixed_point(prob, grid, n, State::zeros(grid.size()), opts);
    REQUIRE(sol.diag.converged);
    double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(sol.dx[i] >= inv_n - 1e-12);
      CHECK(sol.dy[i] >= inv_n - 1e-12);
    }
    CHECK(verify_cone(sol, prob.bc, Cone::NonnegConcave));
  }
}

TEST_CASE("multiplicity search is deterministic and deduplicates") {
  ProblemSpec prob = dn_problem("0", "0");
  SolverOptions opts;
  opts.N = 32;
  auto sols = solve_multi(prob, opts);
  REQUIRE(sols.size() == 1);  // single zero solution after dedup
  for (double v : sols[0].x) CHECK(v == 0.0);

  auto again = solve_multi(prob, opts);
  REQUIRE(again.size() == sols.size());
  for (std::size_t i = 0; i < sols[0].x.size(); ++i)
    CHECK(again[0].x[i] == sols[0].x[i]);  // bit-identical re-run
}

TEST_CASE("solve is bitwise deterministic") {
  ProblemSpec prob = truncated_three_point_example1();
  SolverOptions opts;
  opts.N = 64;
  opts.n_max = 32;
  SolutionPair a = solve_regularized(prob, opts);
  SolutionPair b = solve_regularized(prob, opts);
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    CHECK(a.x[i] == b.x[i]);
    CHECK(a.dy[i] == b.dy[i]);
  }
}
