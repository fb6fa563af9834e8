// Times the stage operator's serial path against the OpenMP path on the
// first worked three-point pair and checks that the images agree bitwise.
#include <chrono>
#include <cstdio>

#include "sbvp/solver.hpp"

using namespace sbvp;

namespace {

double time_apply(const ProblemSpec& prob, const Grid& grid, long n, const State& s,
                  bool parallel, int reps) {
  using clock = std::chrono::steady_clock;
  // warm-up
  State out = apply_T(prob, grid, n, s, parallel);
  auto t0 = clock::now();
  for (int r = 0; r < reps; ++r) out = apply_T(prob, grid, n, s, parallel);
  auto t1 = clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int N = argc > 1 ? std::atoi(argv[1]) : 512;
  int reps = argc > 2 ? std::atoi(argv[2]) : 5;

  ProblemSpec prob;
  prob.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  prob.bc.alpha = 2.0;
  prob.bc.eta = 1.0 / 3.0;
  prob.bc.n = 16;
  prob.p = parse("1/(t*(1-t))");
  prob.q = parse("1/(t*(1-t))");
  prob.f = parse("1/y + 3*y^(1/3)");
  prob.g = parse("1/x + 4*x");
  prob.regularization = Regularization::ShiftState;

  Grid grid = graded_grid(1.0 / 16, 1.0 - 1.0 / 16, N, 4.0, true);
  State s = State::zeros(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.x[i] = s.y[i] = 0.1 * (grid.nodes[i] - grid.lo);

  State a = apply_T(prob, grid, 16, s, false);
  State b = apply_T(prob, grid, 16, s, true);
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    identical = identical && a.x[i] == b.x[i] && a.y[i] == b.y[i] &&
                a.dx[i] == b.dx[i] && a.dy[i] == b.dy[i];

  double serial_ms = time_apply(prob, grid, 16, s, false, reps);
  double parallel_ms = time_apply(prob, grid, 16, s, true, reps);

  std::printf("operator apply, %zu nodes\n", grid.size());
  std::printf("  serial:   %9.3f ms\n", serial_ms);
  std::printf("  parallel: %9.3f ms\n", parallel_ms);
  std::printf("  speedup:  %9.2fx\n", serial_ms / parallel_ms);
  std::printf("  images bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
