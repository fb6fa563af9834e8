#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbvp/expr.hpp"
#include "sbvp/kernels.hpp"
#include "sbvp/quadrature.hpp"
#include "sbvp/transforms.hpp"

namespace sbvp {

/// Verdict of one hypothesis audit. A failure always carries a concrete
/// violating witness; "inconclusive" carries the reason in notes. A supremum
/// that is still growing at the sampling edge is reported as holding with
/// the trending_unbounded flag set (the worked examples typically have
/// sup = infinity).
struct HypothesisReport {
  enum class Verdict { Holds, Fails, Inconclusive };

  std::string label;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;  // distance of the sharpest sampled inequality from equality
  struct Witness {
    double point = 0.0;
    double value = 0.0;
  };
  std::vector<Witness> witnesses;
  std::string notes;
  bool trending_unbounded = false;

  bool holds() const { return verdict == Verdict::Holds; }
};

namespace hypotheses {

/// Convergence-under-refinement audit of integral_{lo}^{hi} weight * envelope.
/// Half-line domains (hi = inf) need a positive decay scale for the tail.
/// The computed value lands in margin.
HypothesisReport check_integrability(const std::string& label, const Expr& weight,
                                     const Expr& envelope, double lo, double hi,
                                     double decay_scale = 0.0);

enum class SupRatioVariant { B4, B11, B14 };

struct SupRatioInputs {
  Expr k1, k2;      // state factors
  Expr h1, h2;      // extra factors of the B14 chain (ignored otherwise)
  Expr u1, v1;      // derivative factors defining I
  Expr u2, v2;      // derivative factors defining J
  double p_int = 0, q_int = 0;
  double a1 = 1, b1 = 1, a2 = 1, b2 = 1;
};

/// sup over a log grid c in [1e-6, 1e6] (241 points) of the chain ratio of
/// the named condition; holds iff the sup exceeds 1.
HypothesisReport check_sup_ratio(const std::string& label, SupRatioVariant variant,
                                 const SupRatioInputs& in);

enum class GrowthVariant {
  A2,   // F(u)/u^alpha -> 0 at infinity
  A3,   // liminf over t-window of f(t,u)/u^beta > 0 at 0+
  B10,  // h(x,y)/x -> infinity uniformly in y
};

struct GrowthInputs {
  Expr fn;           // F(x) for A2; f(t,x) for A3 (x = state); h(x,y) for B10
  double exponent = 1.0;
  double window_lo = 0.0, window_hi = 1.0;  // t-window of A3
};

HypothesisReport check_growth(const std::string& label, GrowthVariant variant,
                              const GrowthInputs& in);

struct OmegaInputs {
  Expr h1, k1, u1, v1, p1;
  Expr h2, k2, u2, v2, p2;
  double decay_scale = 1.0;
  double a1 = 1, b1 = 1, a2 = 1, b2 = 1;
  bool robin_prefactors = false;  // C8 carries the (1 + b_i/a_i) boundary terms
};

/// omega_eps(M) of the half-line conditions evaluated at eps and eps/10 plus
/// the eps -> 0 value; holds iff M / omega(M) > 1. The notes record the
/// eps-trend; margin carries M/omega - 1.
HypothesisReport check_omega(const std::string& label, double M, double eps,
                             const OmegaInputs& in);

/// omega(M) at eps = 0 (exposed for the closed-form cross-check).
double omega_value(double M, double eps, const OmegaInputs& in);

// --- sampled structural checks -------------------------------------------

/// Monotonicity plus the stage constant of (A4): rho_n from its defining
/// inequality at the given truncation index. f(t,u) and G(u) must be
/// nonincreasing in the state.
HypothesisReport check_monotone_floor_A4(const std::string& label, const Expr& f,
                                         const Expr& G, double b_const,
                                         const BoundarySpec& bc, long n);

/// Monotonicity plus the stage constant of (A5): scans a log grid for M with
/// a*mu_n*F(nu_n * int (s-1/n)(1-1/n-s) g(s, M + 1/n) ds) <= M.
HypothesisReport check_ceiling_A5(const std::string& label, const Expr& F,
                                  const Expr& g, double a_const,
                                  const BoundarySpec& bc, long n);

/// Scaling inequalities of (A7)/(A8)/(A10)/(A11): c^beta f <= f(c*arg) <=
/// c^alpha f for c <= 1 and the mirrored chain for c >= 1, sampled per
/// argument slot. Slot 0 scales x, slot 1 scales y.
struct ScalingInputs {
  Expr fn;  // f(t,x,y)
  double alpha1, beta1;  // x-slot exponents
  double alpha2, beta2;  // y-slot exponents
};
HypothesisReport check_scaling(const std::string& label, const ScalingInputs& in);

/// Positivity of f on a sample box (B2, C6).
HypothesisReport check_positivity(const std::string& label, const Expr& fn,
                                  double state_lo, double state_hi,
                                  double t_lo, double t_hi, bool positive_t_only);

/// Factored bound |f| <= k(x)*(u(d)+v(d)) or <= h(x)k(y)(u(d)+v(d)) sampled
/// over a box (B3, C3). Empty h means the three-argument form.
HypothesisReport check_factored_bound(const std::string& label, const Expr& fn,
                                      const Expr& h, const Expr& k, const Expr& u,
                                      const Expr& v, double t_lo, double t_hi,
                                      double box_hi);

/// Lower power bound f >= phi(t) * x^delta (B6/B8) or
/// f >= phi(t) * x^gamma * y^delta (B16, C7) over [0,E]x[0,F] boxes.
struct LowerPowerInputs {
  Expr fn;
  Expr phi;           // positive on the open interval
  double gamma = 0;   // x exponent (0 for the single-power form)
  double delta = 0;   // y exponent of B16/C7, or the single-power exponent
  bool two_powers = false;
  double E = 1, F = 1;       // box
  double t_lo = 0, t_hi = 1;
};
HypothesisReport check_lower_power(const std::string& label, const LowerPowerInputs& in);

/// I(inf) = inf / J(inf) = inf via table-extension trend (B5, C5).
HypothesisReport check_transform_unbounded(const std::string& label, const Expr& u,
                                           const Expr& v);

/// Weighted integrability families (B7/B9/B12/B13/B17):
/// int p(t) * u(C * int_t^1 s^delta p(s) phi(s) ds) dt < inf for C in a small
/// set, convergence judged under refinement. with_s_power switches the
/// s^delta factor (B7/B17) on or off (B12/B13).
struct WeightedIntegrabilityInputs {
  Expr p, u, phi;
  double delta = 0.0;
  bool with_s_power = true;
  std::vector<double> c_values = {0.1, 1.0, 10.0};
};
HypothesisReport check_weighted_integrability(const std::string& label,
                                              const WeightedIntegrabilityInputs& in);

/// int p(t) v(C/t) dt < inf (first half of B9).
HypothesisReport check_inverse_argument_integrability(const std::string& label,
                                                      const Expr& p, const Expr& v);

/// Template audit of the upper/lower-solution family (B18)-(B25): candidate
/// pairs are sampled; second derivatives of the candidates come from central
/// differences. No search is performed.
struct UpperLowerInputs {
  Expr p1, p2;
  Expr f1, f2;              // f_i(t, x, y, d)
  Expr upper1, upper2;      // beta pair, expressions in t
  Expr lower1, lower2;      // alpha pair, expressions in t
  Expr h1, k1, u1, v1, psi1;  // factored bound of B23 (psi in d)
  Expr h2, k2, u2, v2, psi2;
  double rho_n0 = 1e-3;     // floor of the rho sequence at n0
  double psi_decay = 1.0;   // decay scale for int du/psi when it converges
};
std::vector<HypothesisReport> check_upper_lower_template(const UpperLowerInputs& in);

}  // namespace hypotheses
}  // namespace sbvp
