#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbvp/expr.hpp"

namespace sbvp {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monotone map I(mu) = integral_0^mu dtau / (u(tau) + v(tau)) with u positive
/// nonincreasing and v nonnegative nondecreasing. Built once over
/// (0, mu_max] on log-spaced knots with per-segment Gauss panels; apply and
/// invert are pure. Extension past mu_max produces a new Transform value.
class Transform {
 public:
  /// Accuracy target of the tabulated cumulative integral (relative).
  static constexpr double kTableRelTol = 1e-10;

  static Transform build(const Expr& u, const Expr& v, double mu_max);
  static Transform build(const std::function<double(double)>& inv_speed, double mu_max);

  double mu_max() const { return knots_.back(); }
  double value_max() const { return cum_.back(); }

  /// I(z) for 0 <= z <= mu_max. Throws TransformError for z < 0 or beyond
  /// the table.
  double apply(double z) const;

  /// z with |apply(z) - w| <= 1e-9 * max(1, w), by bracketing bisection.
  /// Throws TransformError when w exceeds the reachable range.
  double invert(double w) const;

  /// New transform covering (0, new_mu_max]; state of this one is unchanged.
  Transform extended(double new_mu_max) const;

  struct ClosedFormReport {
    double max_rel_dev = 0.0;
    double worst_point = 0.0;
  };
  /// Max relative deviation of apply() from a reference expression (in the
  /// variable x) over log-spaced samples of (0, mu_max].
  ClosedFormReport check_closed_form(const Expr& reference, int samples) const;

 private:
  std::function<double(double)> integrand_;  // 1/(u+v)
  std::vector<double> knots_;  // ascending, knots_[0] > 0
  std::vector<double> cum_;    // cum_[i] = I(knots_[i])

  double segment_integral(double a, double b) const;
  void tabulate(double mu_max);
};

}  // namespace sbvp
