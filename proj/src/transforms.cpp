#include "sbvp/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace sbvp {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267,
                           -0.5255324099163290, -0.1834346424956498,
                           0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745,
                           0.3137066458778873, 0.3626837833783620,
                           0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

constexpr double kFirstKnot = 1e-12;
constexpr int kKnotsPerBuild = 4096;

}  // namespace

double Transform::segment_integral(double a, double b) const {
  double mid = 0.5 * (a + b);
  double rad = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    double tau = mid + rad * kGx[i];
    double g = integrand_(tau);
    if (!(g >= 0.0) || !std::isfinite(g))
      throw TransformError("invalid transform: u + v not positive at tau = " +
                           std::to_string(tau));
    sum += kGw[i] * g;
  }
  return rad * sum;
}

void Transform::tabulate(double mu_max) {
  if (!(mu_max > kFirstKnot))
    throw TransformError("mu_max must exceed the first table knot");
  knots_.clear();
  cum_.clear();
  knots_.reserve(kKnotsPerBuild + 1);
  cum_.reserve(kKnotsPerBuild + 1);

  const double ratio = std::log(mu_max / kFirstKnot) / kKnotsPerBuild;
  knots_.push_back(kFirstKnot);
  // Leading piece [0, first knot]: the integrand is bounded by 1/u(0+) there;
  // split it geometrically toward 0 so a blow-up of u costs nothing and a
  // bounded u is still integrated accurately.
  double lead = 0.0;
  double hi = kFirstKnot;
  for (int k = 0; k < 64; ++k) {
    double lo = hi * 0.5;
    lead += segment_integral(lo, hi);
    hi = lo;
  }
  lead += segment_integral(0.0, hi);
  cum_.push_back(lead);

  for (int i = 1; i <= kKnotsPerBuild; ++i) {
    double next = kFirstKnot * std::exp(ratio * i);
    if (i == kKnotsPerBuild) next = mu_max;
    double inc = segment_integral(knots_.back(), next);
    knots_.push_back(next);
    cum_.push_back(cum_.back() + inc);
    if (!(cum_.back() >= cum_[cum_.size() - 2]))
      throw TransformError("transform table not increasing");
  }
}

Transform Transform::build(const Expr& u, const Expr& v, double mu_max) {
  Expr uc = u, vc = v;
  return build(
      [uc, vc](double tau) {
        Env env;
        env.x = tau;
        env.y = tau;
        env.t = tau;
        env.d = tau;
        double den = uc.eval(env) + (vc.empty() ? 0.0 : vc.eval(env));
        if (!(den > 0.0))
          throw TransformError("u + v must be positive; got " + std::to_string(den) +
                               " at tau = " + std::to_string(tau));
        return 1.0 / den;
      },
      mu_max);
}

Transform Transform::build(const std::function<double(double)>& inv_speed,
                           double mu_max) {
  Transform t;
  t.integrand_ = inv_speed;
  t.tabulate(mu_max);
  return t;
}

double Transform::apply(double z) const {
  if (z < 0.0) throw TransformError("apply: negative argument");
  if (z == 0.0) return 0.0;
  if (z > knots_.back() * (1.0 + 1e-12))
    throw TransformError("apply: argument " + std::to_string(z) +
                         " beyond table range " + std::to_string(knots_.back()));
  if (z <= knots_.front()) {
    // proportional share of the leading piece plus a correction panel
    return cum_.front() - segment_integral(z, knots_.front());
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), z);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (i + 1 >= knots_.size()) return cum_.back();
  return cum_[i] + segment_integral(knots_[i], std::min(z, knots_.back()));
}

double Transform::invert(double w) const {
  if (w < 0.0) throw TransformError("invert: negative argument");
  if (w == 0.0) return 0.0;
  if (w > cum_.back() * (1.0 + 1e-12))
    throw TransformError("invert: value " + std::to_string(w) +
                         " beyond reachable range " + std::to_string(cum_.back()));

  // bracket by the table, then bisect
  auto it = std::upper_bound(cum_.begin(), cum_.end(), w);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  double lo = (i == 0) ? 0.0 : knots_[i - 1];
  double hi = (i == 0) ? knots_.front() : knots_[std::min(i, knots_.size() - 1)];
  double flo = (i == 0) ? 0.0 : cum_[i - 1];

  // Iterate well past the contract tolerance so invert(apply(z)) recovers z
  // to relative 1e-8 even where the integrand is steep.
  const double tol = 1e-13 * std::max(1.0, w);
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double fm = (mid <= knots_.front() && i == 0)
                    ? apply(mid)
                    : flo + segment_integral(lo, mid);
    if (std::fabs(fm - w) <= tol || (hi - lo) <= 1e-12 * std::max(1e-6, hi))
      return mid;
    if (fm < w) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Transform Transform::extended(double new_mu_max) const {
  Transform t;
  t.integrand_ = integrand_;
  t.tabulate(std::max(new_mu_max, mu_max()));
  return t;
}

Transform::ClosedFormReport Transform::check_closed_form(const Expr& reference,
                                                         int samples) const {
  ClosedFormReport rep;
  const double lo = std::log(knots_.front() * 10.0);
  const double hi = std::log(knots_.back());
  for (int i = 0; i < samples; ++i) {
    double z = std::exp(lo + (hi - lo) * (i + 0.5) / samples);
    z = std::min(z, knots_.back());
    Env env;
    env.x = z;
    env.t = z;
    env.y = z;
    env.d = z;
    double want = reference.eval(env);
    double got = apply(z);
    double dev = std::fabs(got - want) / std::max(1e-300, std::fabs(want));
    if (dev > rep.max_rel_dev) {
      rep.max_rel_dev = dev;
      rep.worst_point = z;
    }
  }
  return rep;
}

}  // namespace sbvp
