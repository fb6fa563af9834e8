#pragma once

#include <stdexcept>
#include <string>

namespace sbvp {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boundary-condition family of a second-order system -u'' = load.
///
/// ThreePoint:           u(0)=0, u(1)=alpha*u(eta)                 on [0,1]
/// ThreePointTruncated:  u(1/n)=0, u(1-1/n)=alpha*u(eta)           on [1/n,1-1/n]
/// FourPointCoupled:     x(0)=y(0)=0, x(1)=alpha*y(xi), y(1)=beta*x(eta)
/// DirichletNeumann:     u(0)=0, u'(1)=0
/// RobinNeumann:         a_i u(0) - b_i u'(0) = 0, u'(1)=0 (per component)
/// TwoPointCoupledRobin: a1 y(0)-b1 x'(0)=0, y'(1)=0; a2 x(0)-b2 y'(0)=0, x'(1)=0
/// DirichletDirichlet:   u(0)=u(1)=0
/// HalfLineDirichlet:    u(0)=0, u'(inf)=0 (truncated stages use u'(m)=0)
/// HalfLineRobin:        a_i u(0) - b_i u'(0) = 0, u'(inf)=0
struct BoundarySpec {
  enum class Kind {
    ThreePoint,
    ThreePointTruncated,
    FourPointCoupled,
    DirichletNeumann,
    RobinNeumann,
    TwoPointCoupledRobin,
    DirichletDirichlet,
    HalfLineDirichlet,
    HalfLineRobin,
  };

  Kind kind = Kind::DirichletNeumann;
  double alpha = 0.0;
  double beta = 0.0;
  double xi = 0.0;
  double eta = 0.0;
  double a1 = 1.0, b1 = 1.0, a2 = 1.0, b2 = 1.0;
  long n = 0;  // truncation index for ThreePointTruncated

  /// Throws KernelError when the parameter constraints of the family are
  /// violated (eta in (0,1) with 0 < alpha*eta < 1; 0 < alpha*beta*xi*eta < 1;
  /// a_i, b_i > 0; n above the admissibility floor for truncated kernels).
  void validate() const;

  /// Smallest admissible truncation index: the least integer exceeding
  /// max{1/eta, 1/(1-eta), (2-alpha)/(1-alpha*eta)} for three-point families,
  /// otherwise 1.
  long min_truncation_index() const;

  static const char* kind_name(Kind k);
};

/// mu/nu envelope constants: K(t,s) <= mu*s(1-s) everywhere and
/// K(t,s) >= nu*s(1-s) for t in [nu_window_lo, nu_window_hi].
struct KernelBounds {
  double mu = 0.0;
  double nu = 0.0;
  double nu_window_lo = 0.0;
  double nu_window_hi = 1.0;
};

namespace kernels {

/// Green's function of u(0)=0, u(1)=alpha*u(eta) on [0,1].
double three_point(double t, double s, double alpha, double eta);
double three_point_dt(double t, double s, double alpha, double eta);

/// Green's function of the truncated three-point problem on [1/n, 1-1/n].
double three_point_truncated(double t, double s, double alpha, double eta, long n);
double three_point_truncated_dt(double t, double s, double alpha, double eta, long n);

/// Coupled four-point kernels; the mirrored pair F_{eta xi}, G_{beta alpha eta xi}
/// is obtained by swapping (alpha,xi) with (beta,eta).
double four_point_F(double t, double s, double alpha, double beta, double xi, double eta);
double four_point_G(double t, double s, double alpha, double beta, double xi, double eta);
double four_point_F_dt(double t, double s, double alpha, double beta, double xi, double eta);
double four_point_G_dt(double t, double s, double alpha, double beta, double xi, double eta);

/// Symmetric two-point kernels on [lo, hi]:
///   DirichletNeumann / HalfLineDirichlet:  min(t,s) - lo
///   RobinNeumann / HalfLineRobin:          (b1 + a1*(min(t,s) - lo)) / a1
///   TwoPointCoupledRobin:                  own-load part, min(t,s) - lo
///   DirichletDirichlet:                    (s-lo)(hi-t)/(hi-lo) for s<=t, mirrored
double two_point(double t, double s, const BoundarySpec& spec, double lo = 0.0,
                 double hi = 1.0);

/// dK/dt of any supported kernel; throws KernelError at the corner t == s
/// (the caller must pick a one-sided value there).
double kernel_dt(double t, double s, const BoundarySpec& spec, double lo = 0.0,
                 double hi = 1.0);

/// Average of the two one-sided t-derivatives; equals kernel_dt away from
/// the corner.
double kernel_dt_avg(double t, double s, const BoundarySpec& spec, double lo = 0.0,
                     double hi = 1.0);

/// Published envelope constants for the family. Supported: ThreePoint,
/// ThreePointTruncated, FourPointCoupled. Other families have no published
/// mu/nu bounds and are reported unsupported.
KernelBounds bounds(const BoundarySpec& spec);

}  // namespace kernels
}  // namespace sbvp
