#pragma once

#include "sbvp/solver.hpp"

namespace sbvp {

/// Window schedule of the diagonalization run: truncated problems on [0, m]
/// for m = 1, 2, 4, ... up to m_max, each stage warm-started from the
/// constant extension of the previous one.
struct HalfLineSchedule {
  double m0 = 1.0;
  double growth = 2.0;
  double m_max = 64.0;
  double tol_tail = 1e-4;     // on |x'(m)| + |y'(m)|
  double tol_compact = 1e-5;  // stage-to-stage sup difference on the previous window
};

namespace halfline {

/// One truncated stage: the problem restricted to [0, m] with the matching
/// Dirichlet/Robin kernel and the 1/n right boundary shift, run through the
/// full n-continuation. A supplied M cap (from the omega conditions) bounds
/// state and derivative via the retraction.
SolutionPair solve_truncated(const ProblemSpec& prob, double m,
                             const SolverOptions& opts);

/// Diagonalization driver: grows m geometrically, warm-starts stages from
/// constant extensions, and stops once the stage tail |x'(m)| + |y'(m)| drops
/// below tol_tail while consecutive stages agree on the previous window
/// within tol_compact. Reaching m_max without both criteria flags the result.
SolutionPair diagonalize(const ProblemSpec& prob, const HalfLineSchedule& schedule,
                         const SolverOptions& opts);

}  // namespace halfline
}  // namespace sbvp
