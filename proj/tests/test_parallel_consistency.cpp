#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbvp/solver.hpp"

using namespace sbvp;

// The OpenMP path parallelizes over output rows while each row accumulates
// serially in index order, so serial and parallel images must be bitwise
// identical.
TEST_CASE("serial and parallel operator applications agree bitwise") {
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  prob.bc.alpha = 2.0;
  prob.bc.eta = 1.0 / 3.0;
  prob.bc.n = 8;
  prob.p = parse("1/(t*(1-t))");
  prob.q = parse("1/(t*(1-t))");
  prob.f = parse("1/y + 3*y^(1/3)");
  prob.g = parse("1/x + 4*x");
  prob.regularization = Regularization::ShiftState;

  Grid grid = graded_grid(1.0 / 8, 1 - 1.0 / 8, 256, 4.0, true);
  State s = State::zeros(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.x[i] = s.y[i] = 0.1 * (grid.nodes[i] - grid.lo);

  State serial = apply_T(prob, grid, 8, s, /*parallel=*/false);
  State parallel = apply_T(prob, grid, 8, s, /*parallel=*/true);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(serial.x[i] == parallel.x[i]);
    REQUIRE(serial.y[i] == parallel.y[i]);
    REQUIRE(serial.dx[i] == parallel.dx[i]);
    REQUIRE(serial.dy[i] == parallel.dy[i]);
  }
}

TEST_CASE("four-point coupled pair agrees bitwise too") {
  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::FourPointCoupled;
  prob.bc.alpha = 0.5;
  prob.bc.beta = 3.0;
  prob.bc.xi = 0.25;
  prob.bc.eta = 0.5;
  prob.p = parse("1/sqrt(t*(1-t))");
  prob.q = parse("1/sqrt(t*(1-t))");
  prob.f = parse("x^(1/4) + y^(1/4) + 1");
  prob.g = parse("x^(1/4) + y^(1/4) + 1");

  Grid grid = graded_grid(0, 1, 300, 4.0, true);
  State s = State::zeros(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.x[i] = s.y[i] = grid.nodes[i];

  State serial = apply_T(prob, grid, 1, s, false);
  State parallel = apply_T(prob, grid, 1, s, true);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(serial.x[i] == parallel.x[i]);
    REQUIRE(serial.y[i] == parallel.y[i]);
  }
}
