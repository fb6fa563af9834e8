#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sbvp/nystrom.hpp"

namespace sbvp {

struct SolverOptions {
  int N = 512;             // interior cells of the stage mesh
  double grading = 4.0;    // grading of auxiliary graded grids
  double omega = 0.5;      // damping of the Picard iteration
  double tol_fp = 1e-10;
  int max_iter = 10000;
  long n0 = 0;             // 0 = derive from the boundary family
  double n_growth = 2.0;
  long n_max = 1L << 26;
  double tol_reg = 1e-6;
  double divergence_cap = 1e6;
  double m_max = 64.0;     // half-line window cap
  double tol_tail = 1e-4;
  double tol_compact = 1e-5;
  enum class Init { Zero, AffineRamp, Supplied } init = Init::AffineRamp;
  double ramp_scale = 0.1;
  double multi_ramp_scale = 10.0;  // second start used by solve_multi
  State supplied;
  bool parallel = true;
};

struct StageInfo {
  long n = 0;
  int iterations = 0;
  double fp_residual = std::numeric_limits<double>::infinity();
  double stage_diff = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Discrete solution pair with diagnostics. Boundary values are operator
/// evaluations at the interval ends (the quadrature nodes stay interior on
/// open grids).
struct SolutionPair {
  Grid grid;
  std::vector<double> x, y, dx, dy;

  struct Diagnostics {
    long n_final = 0;
    std::vector<StageInfo> stages;
    double fp_residual = std::numeric_limits<double>::infinity();
    double ode_residual = std::numeric_limits<double>::infinity();
    double bc_residual = std::numeric_limits<double>::infinity();
    bool positivity_ok = false;
    bool cone_ok = false;
    bool converged = false;   // final stage fixed point converged
    bool reg_cauchy = false;  // continuation stopped via tol_reg
    double stage_diff = std::numeric_limits<double>::infinity();
    std::string flag;         // divergence / domain-error annotation
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    double dx_lo = 0, dx_hi = 0, dy_lo = 0, dy_hi = 0;
    // half-line extras
    double m_final = 0;
    double tail = std::numeric_limits<double>::infinity();
    double compact_diff = std::numeric_limits<double>::infinity();
  } diag;
};

/// Shape constraint verified on a discrete solution.
enum class Cone {
  NonnegConcave,    // x >= 0 and x'' <= 0
  TWeighted,        // x(t) >= t*||x|| and x(1) >= sup t|x'(t)|
  TtGamma,          // x(t) >= t(1-t)*gamma*||x||
  MinWindowGamma,   // min over [max{xi,eta},1] of x >= gamma*||x||
  RobinGamma,       // x >= gamma_i*||x|| and x(0) >= (b_i/a_i)*||x'||
};

Cone chapter_cone(const ProblemSpec& prob);
const char* cone_name(Cone c);

/// One application of the stage operator (exposed for tests and property
/// suites).
State apply_T(const ProblemSpec& prob, const Grid& grid, long n, const State& s,
              bool parallel = true);

/// Damped Picard iteration at a fixed stage n; returns the best state with
/// convergence diagnostics (never throws on non-convergence).
SolutionPair fixed_point(const ProblemSpec& prob, const Grid& grid, long n,
                         const State& init, const SolverOptions& opts);

/// Continuation n -> n0, ceil(growth*n), ... with warm starts; stops when two
/// consecutive stage solutions differ by less than tol_reg in sup norm on the
/// common interval (truncated stages are compared after constant extension),
/// or when n_max is reached (flagged).
SolutionPair solve_regularized(const ProblemSpec& prob, const SolverOptions& opts);

struct ResidualReport {
  double ode_residual = 0.0;
  double bc_residual = 0.0;
  bool positivity_ok = false;
  bool cone_ok = false;
};

/// Normalized finite-difference residual of -u'' = load at interior nodes,
/// boundary-condition residuals of the stage system, positivity and cone
/// membership. Writes the same numbers into sol.diag.
ResidualReport residual(const ProblemSpec& prob, SolutionPair& sol);

/// Best-effort multiplicity search from distinct initial iterates;
/// deduplicates converged solutions at sup-distance 1e-3.
std::vector<SolutionPair> solve_multi(const ProblemSpec& prob,
                                      const SolverOptions& opts);

/// Discrete cone inequalities with slack >= -1e-9.
bool verify_cone(const SolutionPair& sol, const BoundarySpec& bc, Cone cone);

/// Piecewise-linear evaluation with constant extension outside the grid range.
double interp_linear(const Grid& g, const std::vector<double>& v, double t,
                     double left_value, double right_value);

}  // namespace sbvp
