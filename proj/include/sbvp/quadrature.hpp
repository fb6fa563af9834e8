#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbvp {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature mesh on [lo, hi] with panels clustered toward both endpoints
/// with density proportional to distance^(1/grading). Open grids keep every
/// node strictly inside (lo, hi) (composite midpoint in the graded variable);
/// closed grids include the endpoints (composite trapezoid).
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  double grading = 1.0;
  bool open = true;
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive, same length

  std::size_t size() const { return nodes.size(); }
};

/// Builds a 2N-panel graded mesh (N panels per half-interval).
/// Throws QuadratureError for N < 8 or grading < 1.
Grid graded_grid(double lo, double hi, int n_per_half, double grading, bool open);

/// Sum of w_i * f(node_i) with compensated summation. A non-finite integrand
/// value is reported with its node location.
double integrate(const std::function<double(double)>& f, const Grid& grid);

/// Open graded rule refined by one Richardson step over N -> 2N (the rule
/// has a clean O(N^-2) leading term when grading*(1 - endpoint exponent) >= 1).
double integrate_refined(const std::function<double(double)>& f, double lo,
                         double hi, int n_per_half, double grading);

/// Weighted sum over precomputed integrand values on the grid nodes.
double weighted_sum(const std::vector<double>& values, const Grid& grid);

struct TailOptions {
  int n_per_half = 2048;
  double grading = 4.0;
  double tail_tol = 1e-12;
};

/// Integral of f over [lo, inf) for integrands bounded by A*exp(-t/decay_scale).
/// The domain is truncated where the analytic envelope tail drops below
/// tail_tol and the rest handled by a graded open mesh. Throws QuadratureError
/// when decay_scale is not positive (truncation not certifiable).
double integrate_tail(const std::function<double(double)>& f, double lo,
                      double decay_scale, const TailOptions& opts = {});

}  // namespace sbvp
