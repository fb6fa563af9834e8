#include "sbvp/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sbvp {

const char* BoundarySpec::kind_name(Kind k) {
  switch (k) {
    case Kind::ThreePoint: return "three_point";
    case Kind::ThreePointTruncated: return "three_point_truncated";
    case Kind::FourPointCoupled: return "four_point_coupled";
    case Kind::DirichletNeumann: return "dirichlet_neumann";
    case Kind::RobinNeumann: return "robin_neumann";
    case Kind::TwoPointCoupledRobin: return "two_point_coupled_robin";
    case Kind::DirichletDirichlet: return "dirichlet_dirichlet";
    case Kind::HalfLineDirichlet: return "half_line_dirichlet";
    case Kind::HalfLineRobin: return "half_line_robin";
  }
  return "?";
}

long BoundarySpec::min_truncation_index() const {
  if (kind != Kind::ThreePoint && kind != Kind::ThreePointTruncated) return 1;
  double bound = std::max({1.0 / eta, 1.0 / (1.0 - eta),
                           (2.0 - alpha) / (1.0 - alpha * eta)});
  long n0 = static_cast<long>(std::floor(bound)) + 1;
  return std::max(n0, 2L);
}

void BoundarySpec::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw KernelError(msg);
  };
  switch (kind) {
    case Kind::ThreePoint:
    case Kind::ThreePointTruncated:
      require(eta > 0.0 && eta < 1.0, "three-point: eta must lie in (0,1)");
      require(alpha > 0.0 && alpha * eta > 0.0 && alpha * eta < 1.0,
              "three-point: need 0 < alpha*eta < 1");
      if (kind == Kind::ThreePointTruncated && n != 0)  // n == 0: schedule decides
        require(n >= min_truncation_index(),
                "three-point truncated: n below the admissibility floor " +
                    std::to_string(min_truncation_index()));
      break;
    case Kind::FourPointCoupled:
      require(xi > 0.0 && xi < 1.0 && eta > 0.0 && eta < 1.0,
              "four-point: xi, eta must lie in (0,1)");
      require(alpha > 0.0 && beta > 0.0 && alpha * beta * xi * eta < 1.0,
              "four-point: need 0 < alpha*beta*xi*eta < 1");
      break;
    case Kind::RobinNeumann:
    case Kind::TwoPointCoupledRobin:
    case Kind::HalfLineRobin:
      require(a1 > 0.0 && b1 > 0.0 && a2 > 0.0 && b2 > 0.0,
              "robin: a_i and b_i must be positive");
      break;
    case Kind::DirichletNeumann:
    case Kind::DirichletDirichlet:
    case Kind::HalfLineDirichlet:
      break;
  }
}

namespace kernels {

double three_point(double t, double s, double alpha, double eta) {
  const double den = 1.0 - alpha * eta;
  double v = t * (1.0 - s) / den;
  if (s <= eta) v -= alpha * t * (eta - s) / den;
  if (s <= t) v -= (t - s);
  return v;
}

double three_point_dt(double t, double s, double alpha, double eta) {
  const double den = 1.0 - alpha * eta;
  double v = (1.0 - s) / den;
  if (s <= eta) v -= alpha * (eta - s) / den;
  if (s < t) v -= 1.0;
  return v;
}

double three_point_truncated(double t, double s, double alpha, double eta, long n) {
  const double lo = 1.0 / static_cast<double>(n);
  const double hi = 1.0 - lo;
  const double den = 1.0 - 2.0 * lo + alpha * lo - alpha * eta;
  double core = (hi - s);
  if (s <= eta) core -= alpha * (eta - s);
  double v = (t - lo) * core / den;
  if (s <= t) v -= (t - s);
  return v;
}

double three_point_truncated_dt(double t, double s, double alpha, double eta, long n) {
  const double lo = 1.0 / static_cast<double>(n);
  const double hi = 1.0 - lo;
  const double den = 1.0 - 2.0 * lo + alpha * lo - alpha * eta;
  double core = (hi - s);
  if (s <= eta) core -= alpha * (eta - s);
  double v = core / den;
  if (s < t) v -= 1.0;
  return v;
}

double four_point_F(double t, double s, double alpha, double beta, double xi,
                    double eta) {
  const double den = 1.0 - alpha * beta * xi * eta;
  double v = t * (1.0 - s) / den;
  if (s <= eta) v -= alpha * beta * xi * t * (eta - s) / den;
  if (s <= t) v -= (t - s);
  return v;
}

double four_point_F_dt(double t, double s, double alpha, double beta, double xi,
                       double eta) {
  const double den = 1.0 - alpha * beta * xi * eta;
  double v = (1.0 - s) / den;
  if (s <= eta) v -= alpha * beta * xi * (eta - s) / den;
  if (s < t) v -= 1.0;
  return v;
}

double four_point_G(double t, double s, double alpha, double beta, double xi,
                    double eta) {
  const double den = 1.0 - alpha * beta * xi * eta;
  double v = alpha * xi * t * (1.0 - s) / den;
  if (s <= xi) v -= alpha * t * (xi - s) / den;
  return v;
}

double four_point_G_dt(double t, double s, double alpha, double beta, double xi,
                       double eta) {
  const double den = 1.0 - alpha * beta * xi * eta;
  double v = alpha * xi * (1.0 - s) / den;
  if (s <= xi) v -= alpha * (xi - s) / den;
  return v;
}

double two_point(double t, double s, const BoundarySpec& spec, double lo, double hi) {
  switch (spec.kind) {
    case BoundarySpec::Kind::ThreePoint:
      return three_point(t, s, spec.alpha, spec.eta);
    case BoundarySpec::Kind::ThreePointTruncated:
      return three_point_truncated(t, s, spec.alpha, spec.eta, spec.n);
    case BoundarySpec::Kind::DirichletNeumann:
    case BoundarySpec::Kind::HalfLineDirichlet:
    case BoundarySpec::Kind::TwoPointCoupledRobin:
      return std::min(t, s) - lo;
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      return (spec.b1 + spec.a1 * (std::min(t, s) - lo)) / spec.a1;
    case BoundarySpec::Kind::DirichletDirichlet: {
      double w = hi - lo;
      return s <= t ? (s - lo) * (hi - t) / w : (t - lo) * (hi - s) / w;
    }
    case BoundarySpec::Kind::FourPointCoupled:
      throw KernelError("four-point family uses the kernel pair, not two_point");
  }
  throw KernelError("unknown boundary family");
}

namespace {

double dt_side(double t, double s, const BoundarySpec& spec, double lo, double hi,
               bool s_below_t) {
  switch (spec.kind) {
    case BoundarySpec::Kind::ThreePoint: {
      const double den = 1.0 - spec.alpha * spec.eta;
      double v = (1.0 - s) / den;
      if (s <= spec.eta) v -= spec.alpha * (spec.eta - s) / den;
      if (s_below_t) v -= 1.0;
      return v;
    }
    case BoundarySpec::Kind::ThreePointTruncated: {
      const double l = 1.0 / static_cast<double>(spec.n);
      const double den = 1.0 - 2.0 * l + spec.alpha * l - spec.alpha * spec.eta;
      double core = (1.0 - l - s);
      if (s <= spec.eta) core -= spec.alpha * (spec.eta - s);
      double v = core / den;
      if (s_below_t) v -= 1.0;
      return v;
    }
    case BoundarySpec::Kind::DirichletNeumann:
    case BoundarySpec::Kind::HalfLineDirichlet:
    case BoundarySpec::Kind::TwoPointCoupledRobin:
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      return s_below_t ? 0.0 : 1.0;
    case BoundarySpec::Kind::DirichletDirichlet: {
      double w = hi - lo;
      return s_below_t ? -(s - lo) / w : (hi - s) / w;
    }
    case BoundarySpec::Kind::FourPointCoupled:
      throw KernelError("four-point family uses the kernel pair, not kernel_dt");
  }
  throw KernelError("unknown boundary family");
}

}  // namespace

double kernel_dt(double t, double s, const BoundarySpec& spec, double lo, double hi) {
  if (t == s)
    throw KernelError("kernel corner at t == s = " + std::to_string(t) +
                      "; use a one-sided value");
  return dt_side(t, s, spec, lo, hi, s < t);
}

double kernel_dt_avg(double t, double s, const BoundarySpec& spec, double lo,
                     double hi) {
  if (t == s)
    return 0.5 * (dt_side(t, s, spec, lo, hi, true) + dt_side(t, s, spec, lo, hi, false));
  return dt_side(t, s, spec, lo, hi, s < t);
}

KernelBounds bounds(const BoundarySpec& spec) {
  spec.validate();
  KernelBounds kb;
  switch (spec.kind) {
    case BoundarySpec::Kind::ThreePoint: {
      const double den = 1.0 - spec.alpha * spec.eta;
      kb.mu = std::max(1.0, spec.alpha) / den;
      kb.nu = std::min(1.0, spec.alpha) * std::min(spec.eta, 1.0 - spec.eta) / den;
      kb.nu_window_lo = spec.eta;
      kb.nu_window_hi = 1.0;
      return kb;
    }
    case BoundarySpec::Kind::ThreePointTruncated: {
      const double l = 1.0 / static_cast<double>(spec.n);
      const double den = 1.0 - 2.0 * l + spec.alpha * l - spec.alpha * spec.eta;
      kb.mu = std::max(1.0, spec.alpha) / den;
      kb.nu = std::min(1.0, spec.alpha) *
              std::min(spec.eta - l, 1.0 - l - spec.eta) / den;
      kb.nu_window_lo = spec.eta;
      kb.nu_window_hi = 1.0 - l;
      return kb;
    }
    case BoundarySpec::Kind::FourPointCoupled: {
      const double a = spec.alpha, b = spec.beta, xi = spec.xi, eta = spec.eta;
      const double den = 1.0 - a * b * xi * eta;
      kb.mu = std::max({1.0, a, b, a * b * xi, a * b * eta}) / den;
      kb.nu = std::min({1.0, a * xi, a * b * xi, b * eta, a * b * eta}) *
              std::min({xi, eta, 1.0 - xi, 1.0 - eta}) / den;
      kb.nu_window_lo = std::max(xi, eta);
      kb.nu_window_hi = 1.0;
      return kb;
    }
    default:
      throw KernelError(std::string("no published envelope bounds for family ") +
                        BoundarySpec::kind_name(spec.kind));
  }
}

}  // namespace kernels
}  // namespace sbvp
