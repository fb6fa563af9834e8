#include "sbvp/halfline.hpp"

#include <algorithm>
#include <cmath>

namespace sbvp {
namespace halfline {

namespace {

ProblemSpec window_problem(const ProblemSpec& prob, double m) {
  ProblemSpec w = prob;
  w.halfline = false;
  w.lo = 0.0;
  w.hi = m;
  // the half-line families keep their kernels; only the window changes
  return w;
}

double sup_diff_on_window(const SolutionPair& cur, const SolutionPair& prev,
                          double window_hi) {
  double diff = 0.0;
  for (std::size_t i = 0; i < cur.grid.size(); ++i) {
    double t = cur.grid.nodes[i];
    if (t > window_hi) continue;
    double px = interp_linear(prev.grid, prev.x, t, prev.diag.x_lo, prev.diag.x_hi);
    double py = interp_linear(prev.grid, prev.y, t, prev.diag.y_lo, prev.diag.y_hi);
    diff = std::max(diff, std::fabs(cur.x[i] - px));
    diff = std::max(diff, std::fabs(cur.y[i] - py));
  }
  return diff;
}

}  // namespace

SolutionPair solve_truncated(const ProblemSpec& prob, double m,
                             const SolverOptions& opts) {
  if (!prob.halfline) throw KernelError("solve_truncated expects a half-line problem");
  ProblemSpec w = window_problem(prob, m);
  SolverOptions stage_opts = opts;
  // keep the interior cell width roughly window-independent so consecutive
  // stages resolve the shared window equally and their sup difference
  // measures genuine convergence rather than re-meshing
  stage_opts.N = static_cast<int>(
      std::clamp(6.0 * m, 128.0, std::min(384.0, double(opts.N) * 2)));
  SolutionPair sol = solve_regularized(w, stage_opts);
  sol.diag.m_final = m;
  sol.diag.tail = std::fabs(sol.diag.dx_hi) + std::fabs(sol.diag.dy_hi);
  return sol;
}

SolutionPair diagonalize(const ProblemSpec& prob, const HalfLineSchedule& schedule,
                         const SolverOptions& opts) {
  if (!prob.halfline) throw KernelError("diagonalize expects a half-line problem");
  double m = schedule.m0;
  SolutionPair prev;
  bool have_prev = false;

  long n_hint = 0;
  while (true) {
    SolverOptions stage_opts = opts;
    if (n_hint > 0) stage_opts.n0 = std::max(stage_opts.n0, n_hint);
    if (have_prev) {
      // warm start: interpolate the previous constant extension onto the new
      // window (zero derivative beyond the old window)
      Grid g = graded_grid(0.0, m, opts.N, opts.grading, true);
      State init = State::zeros(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        double t = g.nodes[i];
        init.x[i] = interp_linear(prev.grid, prev.x, t, prev.diag.x_lo, prev.diag.x_hi);
        init.y[i] = interp_linear(prev.grid, prev.y, t, prev.diag.y_lo, prev.diag.y_hi);
        if (t < prev.grid.hi) {
          init.dx[i] =
              interp_linear(prev.grid, prev.dx, t, prev.diag.dx_lo, prev.diag.dx_hi);
          init.dy[i] =
              interp_linear(prev.grid, prev.dy, t, prev.diag.dy_lo, prev.diag.dy_hi);
        }
      }
      stage_opts.init = SolverOptions::Init::Supplied;
      stage_opts.supplied = std::move(init);
    }

    SolutionPair cur = solve_truncated(prob, m, stage_opts);
    (void)0;
    if (!cur.diag.converged) {
      if (have_prev) {
        prev.diag.flag = "diagonalization stopped at m=" + std::to_string(m) + " (" +
                         (cur.diag.flag.empty() ? "stage failed" : cur.diag.flag) + ")";
        return prev;
      }
      return cur;
    }

    if (have_prev) {
      cur.diag.compact_diff = sup_diff_on_window(cur, prev, prev.grid.hi);
      if (cur.diag.tail < schedule.tol_tail &&
          cur.diag.compact_diff < schedule.tol_compact)
        return cur;
    }

    n_hint = std::max(4L, cur.diag.n_final / 4);
    prev = std::move(cur);
    have_prev = true;
    double next = m * schedule.growth;
    if (next > schedule.m_max * (1.0 + 1e-12)) {
      prev.diag.flag =
          "diagonalization reached m_max without tail decay; tail trace: |x'(m)|+|y'(m)|=" +
          std::to_string(prev.diag.tail) + ", window diff=" +
          std::to_string(prev.diag.compact_diff);
      prev.diag.converged = false;
      return prev;
    }
    m = next;
  }
}

}  // namespace halfline
}  // namespace sbvp
