#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbvp/expr.hpp"
#include "sbvp/kernels.hpp"
#include "sbvp/quadrature.hpp"

namespace sbvp {

/// Discrete state of a coupled pair on a grid.
struct State {
  std::vector<double> x, y, dx, dy;

  static State zeros(std::size_t n);
  std::size_t size() const { return x.size(); }
};

/// How the singular problem is modified at stage n.
enum class Regularization {
  None,
  ShiftState,       // state arguments replaced by max{v + 1/n, 1/n}
  ShiftDerivative,  // state arguments shifted by (t+c)/n, derivative by |d| + 1/n
  RetractionBox,    // state clamped to [0, cap], derivative to [1/n, cap]
};

/// Problem instance: -x'' = p(t) f(t,x,y,x'), -y'' = q(t) g(t,x,y,y') under
/// bc, with the chapter's regularization. Expressions use d for the own
/// component's derivative.
struct ProblemSpec {
  double lo = 0.0;
  double hi = 1.0;
  bool halfline = false;
  BoundarySpec bc;
  Expr p, q, f, g;
  Regularization regularization = Regularization::None;
  struct Singular {
    bool x = false, y = false, d = false, endpoints = false;
  } singular;
  double cap_state = 1e6;
  double cap_deriv = 1e6;

  void validate() const;
};

namespace nystrom {

/// Kernel selector for the inner loops; keeps the dispatch branch-predictable
/// and allocation-free.
struct KernelCtx {
  enum class Id {
    ThreePoint,
    ThreePointTruncated,
    FourPointF,
    FourPointG,
    Min,         // min(t,s) - lo
    Robin,       // (b + a*(min(t,s)-lo))/a
    DirichletDirichlet,
  };
  Id id = Id::Min;
  double alpha = 0, beta = 0, xi = 0, eta = 0;
  double a = 1, b = 1;
  double lo = 0, hi = 1;
  long n = 0;

  double value(double t, double s) const;
  /// One-sided t-derivative; the side is decided by s < t vs s > t, the
  /// midpoint of the two branches at s == t.
  double dt(double t, double s) const;

  /// s-location of the kernel's fixed kink (eta or xi), if any.
  std::optional<double> fixed_kink() const;
  /// Whether the kernel carries the -(t-s) corner at s == t.
  bool has_diagonal_kink() const;
};

/// Stage mesh: geometric cascades of cells into both endpoints (resolving
/// every length scale down to the double-precision spacing at the endpoint)
/// around a uniform interior. Nodes are the cell midpoints; weights the cell
/// widths. Endpoint-singular loads integrate accurately because the cascade
/// keeps a constant number of cells per length decade and the remaining
/// sub-resolution mass extrapolates as a geometric series.
Grid stage_mesh(double lo, double hi, int interior_cells);

/// Whether a grid came from stage_mesh (cell semantics) rather than from
/// graded_grid (point-rule semantics).
bool is_stage_mesh(const Grid& g);

/// Product-integration rule over a stage mesh: Gauss points per cell (4 on
/// cascade cells, 2 on interior ones), cells split at kernel kinks. All
/// kernels are piecewise linear in s, so splitting keeps the integrand
/// smooth inside every sub-cell.
class CellRule {
 public:
  CellRule(const Grid& grid, std::optional<double> fixed_kink);

  const Grid& grid() const { return *grid_; }

  /// Static quadrature points (kink-split cells included).
  const std::vector<double>& points() const { return s_; }
  const std::vector<double>& weights() const { return w_; }

  /// Linear-in-s interpolation of node values onto an arbitrary point, with
  /// constant extension beyond the first/last node.
  double interp(const std::vector<double>& node_values, double s) const;

  /// Load representation: the (possibly endpoint-singular) weight factor is
  /// evaluated exactly at quadrature points; only the smooth nonlinearity
  /// factor is interpolated from the nodes. The tail masses carry the
  /// geometric extrapolation of the load beyond the innermost cells.
  struct LoadView {
    const std::vector<double>* pts;      // weight * f at the static points
    const std::vector<double>* f_nodes;  // f factor at grid nodes
    const Expr* weight;                  // may be empty (constant 1)
    const CellRule* rule;
    double tail_mass_lo = 0.0;  // extrapolated sub-resolution load mass
    double tail_mass_hi = 0.0;

    double at(double s) const {
      double w = weight && !weight->empty() ? weight->eval(Env::of_t(s)) : 1.0;
      return w * rule->interp(*f_nodes, s);
    }
  };

  /// Fills the tail masses of a load view from the masses of the innermost
  /// cascade cells (ratio-clamped geometric series).
  void set_tail_masses(LoadView& view) const;

  /// Integral of the load against a kernel row at t, splitting the cell
  /// containing t at the diagonal kink and adding the tail contributions.
  struct RowResult {
    double value;
    double derivative;
  };
  RowResult row(const KernelCtx& k, double t, const LoadView& load) const;

  /// Plain integral of the load over the interval (tails included).
  double total(const LoadView& load) const;

  double tail_anchor_lo() const { return tail_lo_; }
  double tail_anchor_hi() const { return tail_hi_; }

 private:
  const Grid* grid_;
  std::vector<double> s_, w_;
  std::vector<int> cell_begin_;  // [first,last) into s_/w_ per cell
  std::vector<double> cell_a_, cell_b_;
  std::vector<bool> cell_cascade_;
  double kink_ = -1.0;  // fixed kernel kink (eta/xi), if inside the mesh
  int kink_cell_ = -1;
  double tail_lo_ = 0.0, tail_hi_ = 0.0;  // evaluation anchors of the tails
  // index ranges of the innermost two cascade cells at each end
  int lo_inner_[2] = {-1, -1};
  int hi_inner_[2] = {-1, -1};

  void emit_cell(double a, double b, int gauss_points, std::vector<double>& s,
                 std::vector<double>& w) const;
  int cell_of(double s) const;
};

/// One regularization stage of a problem: grid, kernels, affine boundary
/// terms and load evaluation wired per chapter. apply() performs one
/// application of the stage operator T_n.
class StageOperator {
 public:
  StageOperator(const ProblemSpec& prob, Grid grid, long n);

  const Grid& grid() const { return grid_; }
  long stage_index() const { return n_; }
  double stage_lo() const { return grid_.lo; }
  double stage_hi() const { return grid_.hi; }

  struct Loads {
    std::vector<double> fx, gy;            // full loads p*f, q*g at grid nodes
    std::vector<double> fx_part, gy_part;  // nonlinearity factors at grid nodes
    std::vector<double> fx_pts, gy_pts;    // weighted loads at the rule points
  };

  State apply(const State& s, bool parallel) const;

  struct PointValues {
    double x, dx, y, dy;
  };
  PointValues eval_at(const Loads& loads, double t) const;
  Loads loads_for(const State& s) const;

  /// Regularized argument map at node value level (exposed for residual
  /// checks). dval is the own-component derivative.
  Env reg_env(double t, double xv, double yv, double dval) const;

  double affine_x(double t) const;
  double affine_y(double t) const;
  double affine_dx() const;
  double affine_dy() const;

 private:
  const ProblemSpec& prob_;
  Grid grid_;
  long n_;
  std::vector<double> pv_, qv_;  // weight expressions at nodes
  KernelCtx kx_, ky_;            // own-load kernels
  std::optional<KernelCtx> kx_cross_, ky_cross_;  // four-point cross kernels
  std::optional<CellRule> rule_x_, rule_y_, rule_xc_, rule_yc_;
  // weight values at each rule's static points
  std::vector<double> px_pts_, qy_pts_, qxc_pts_, pyc_pts_;
  double cross_const_x_ = 0.0;   // coupled two-point constants
  double cross_const_y_ = 0.0;
  double aff_cx_ = -1.0;         // x affine term (t - lo + c)/n; negative = off
  double aff_cy_ = -1.0;
  bool sequential_ = false;

  double robin_cx() const;
  double robin_cy() const;
  CellRule::LoadView make_view(const CellRule& rule, const std::vector<double>& pts,
                               const std::vector<double>& f_nodes,
                               const Expr& weight) const;
  void fill_component(const KernelCtx& k, const CellRule& rule,
                      const CellRule::LoadView& load, std::vector<double>& out_val,
                      std::vector<double>& out_dt, bool parallel) const;
};

}  // namespace nystrom
}  // namespace sbvp
