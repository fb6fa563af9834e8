#include "sbvp/nystrom.hpp"

#include <algorithm>
#include <cmath>

namespace sbvp {

State State::zeros(std::size_t n) {
  State s;
  s.x.assign(n, 0.0);
  s.y.assign(n, 0.0);
  s.dx.assign(n, 0.0);
  s.dy.assign(n, 0.0);
  return s;
}

void ProblemSpec::validate() const {
  bc.validate();
  if (!halfline && !(hi > lo)) throw KernelError("degenerate interval");
  auto check_weight = [](const Expr& e, const char* which) {
    if (e.empty()) return;
    for (Var v : e.free_vars())
      if (v != Var::T)
        throw KernelError(std::string(which) + " may only depend on t");
  };
  check_weight(p, "weight p");
  check_weight(q, "weight q");
  if (f.empty() || g.empty()) throw KernelError("nonlinearities f and g are required");
}

namespace nystrom {

double KernelCtx::value(double t, double s) const {
  switch (id) {
    case Id::ThreePoint:
      return kernels::three_point(t, s, alpha, eta);
    case Id::ThreePointTruncated:
      return kernels::three_point_truncated(t, s, alpha, eta, n);
    case Id::FourPointF:
      return kernels::four_point_F(t, s, alpha, beta, xi, eta);
    case Id::FourPointG:
      return kernels::four_point_G(t, s, alpha, beta, xi, eta);
    case Id::Min:
      return std::min(t, s) - lo;
    case Id::Robin:
      return (b + a * (std::min(t, s) - lo)) / a;
    case Id::DirichletDirichlet: {
      double w = hi - lo;
      return s <= t ? (s - lo) * (hi - t) / w : (t - lo) * (hi - s) / w;
    }
  }
  return 0.0;
}

double KernelCtx::dt(double t, double s) const {
  const double step = s < t ? 1.0 : (s > t ? 0.0 : 0.5);  // weight of the s<t branch
  switch (id) {
    case Id::ThreePoint: {
      const double den = 1.0 - alpha * eta;
      double v = (1.0 - s) / den;
      if (s <= eta) v -= alpha * (eta - s) / den;
      return v - step;
    }
    case Id::ThreePointTruncated: {
      const double l = 1.0 / static_cast<double>(n);
      const double den = 1.0 - 2.0 * l + alpha * l - alpha * eta;
      double core = (1.0 - l - s);
      if (s <= eta) core -= alpha * (eta - s);
      return core / den - step;
    }
    case Id::FourPointF: {
      const double den = 1.0 - alpha * beta * xi * eta;
      double v = (1.0 - s) / den;
      if (s <= eta) v -= alpha * beta * xi * (eta - s) / den;
      return v - step;
    }
    case Id::FourPointG:
      return kernels::four_point_G_dt(t, s, alpha, beta, xi, eta);
    case Id::Min:
    case Id::Robin:
      return 1.0 - step;
    case Id::DirichletDirichlet: {
      double w = hi - lo;
      if (s < t) return -(s - lo) / w;
      if (s > t) return (hi - s) / w;
      return 0.5 * (-(s - lo) + (hi - s)) / w;
    }
  }
  return 0.0;
}

std::optional<double> KernelCtx::fixed_kink() const {
  switch (id) {
    case Id::ThreePoint:
    case Id::ThreePointTruncated:
    case Id::FourPointF:
      return eta;
    case Id::FourPointG:
      return xi;
    default:
      return std::nullopt;
  }
}

bool KernelCtx::has_diagonal_kink() const { return id != Id::FourPointG; }

// ---------------------------------------------------------------------------
// stage mesh

namespace {

constexpr double kEps = 2.220446049250313e-16;

// cascade cells shrink by this factor toward the endpoint
constexpr double kCascadeRatio = 0.5;

// Fraction of the interval given to each endpoint cascade.
constexpr double kCascadeFrac = 1.0 / 64.0;

struct CellLayout {
  std::vector<double> bounds;  // ascending cell boundaries
};

// Cells: [dmin, 2 dmin, ..., w] geometric into the left end, a uniform
// interior, and the mirror cascade into the right end. The slivers
// [lo, lo + dmin] and [hi - dmin, hi] stay uncovered; their load mass is
// recovered by the geometric tail extrapolation of the rule.
CellLayout build_cells(double lo, double hi, int interior_cells) {
  const double width = hi - lo;
  // the cascade's outermost cells must not be coarser than the interior
  const double w =
      width * std::min(kCascadeFrac, 2.0 / std::max(interior_cells, 16));
  const double scale = std::max({std::fabs(lo), std::fabs(hi), 1.0});
  double dmin = std::max(64.0 * kEps * scale, width * 1e-15);
  int K = std::max(2, static_cast<int>(std::ceil(
                          std::log(w / dmin) / std::log(1.0 / kCascadeRatio))));
  dmin = w * std::pow(kCascadeRatio, K);

  CellLayout out;
  out.bounds.reserve(2 * K + interior_cells + 2);
  for (int k = K; k >= 0; --k)
    out.bounds.push_back(lo + w * std::pow(kCascadeRatio, k));

  const double mid_lo = lo + w, mid_hi = hi - w;
  const int M = std::max(interior_cells, 16);
  for (int j = 1; j <= M; ++j) out.bounds.push_back(mid_lo + (mid_hi - mid_lo) * j / M);

  for (int k = 1; k <= K; ++k)
    out.bounds.push_back(hi - w * std::pow(kCascadeRatio, k));
  return out;
}

// 2- and 4-point Gauss-Legendre abscissae/weights on [-1, 1]
constexpr double kG2 = 0.5773502691896257;
constexpr double kG4x[4] = {-0.8611363115940526, -0.3399810435848563,
                            0.3399810435848563, 0.8611363115940526};
constexpr double kG4w[4] = {0.3478548451374539, 0.6521451548625461,
                            0.6521451548625461, 0.3478548451374539};

struct Accum {
  double sum = 0.0;
  double comp = 0.0;
  inline void add(double v) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  inline double get() const { return sum + comp; }
};

}  // namespace

Grid stage_mesh(double lo, double hi, int interior_cells) {
  if (!(hi > lo)) throw QuadratureError("degenerate interval");
  CellLayout cells = build_cells(lo, hi, interior_cells);
  Grid g;
  g.lo = lo;
  g.hi = hi;
  g.grading = 0.0;  // marker: cell mesh, not a power-graded mesh
  g.open = true;
  for (std::size_t c = 0; c + 1 < cells.bounds.size(); ++c) {
    double a = cells.bounds[c], b = cells.bounds[c + 1];
    if (!(b > a)) throw QuadratureError("stage mesh collapsed (interval too small)");
    g.nodes.push_back(0.5 * (a + b));
    g.weights.push_back(b - a);
  }
  for (std::size_t i = 1; i < g.nodes.size(); ++i)
    if (!(g.nodes[i] > g.nodes[i - 1]))
      throw QuadratureError("stage mesh nodes not strictly increasing");
  return g;
}

bool is_stage_mesh(const Grid& g) { return g.grading == 0.0; }

// ---------------------------------------------------------------------------
// CellRule

void CellRule::emit_cell(double a, double b, int gauss_points, std::vector<double>& s,
                         std::vector<double>& w) const {
  const double dz = b - a;
  if (!(dz > 0)) return;
  const double mid = 0.5 * (a + b), rad = 0.5 * dz;
  if (gauss_points >= 4) {
    for (int i = 0; i < 4; ++i) {
      s.push_back(mid + rad * kG4x[i]);
      w.push_back(rad * kG4w[i]);
    }
  } else {
    s.push_back(mid - rad * kG2);
    w.push_back(rad);
    s.push_back(mid + rad * kG2);
    w.push_back(rad);
  }
}

int CellRule::cell_of(double s) const {
  auto it = std::upper_bound(cell_b_.begin(), cell_b_.end(), s);
  int c = static_cast<int>(it - cell_b_.begin());
  return std::min(c, static_cast<int>(cell_b_.size()) - 1);
}

CellRule::CellRule(const Grid& grid, std::optional<double> fixed_kink)
    : grid_(&grid) {
  const std::size_t C = grid.size();
  const bool staged = is_stage_mesh(grid);
  const double w_casc = (grid.hi - grid.lo) * kCascadeFrac;
  cell_a_.resize(C);
  cell_b_.resize(C);
  cell_cascade_.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    if (staged) {
      cell_a_[c] = grid.nodes[c] - 0.5 * grid.weights[c];
      cell_b_[c] = grid.nodes[c] + 0.5 * grid.weights[c];
    } else {
      // generic node set: cells from midpoints between nodes
      cell_a_[c] = c == 0 ? grid.lo : 0.5 * (grid.nodes[c - 1] + grid.nodes[c]);
      cell_b_[c] =
          c + 1 == C ? grid.hi : 0.5 * (grid.nodes[c] + grid.nodes[c + 1]);
    }
  }
  if (staged) {
    // snap shared boundaries; the slivers outside the outer cells stay
    // uncovered and belong to the tail extrapolation
    for (std::size_t c = 0; c + 1 < C; ++c) {
      double shared = 0.5 * (cell_b_[c] + cell_a_[c + 1]);
      cell_b_[c] = shared;
      cell_a_[c + 1] = shared;
    }
  }
  for (std::size_t c = 0; c < C; ++c)
    cell_cascade_[c] = staged && (cell_b_[c] <= grid.lo + 1.01 * w_casc ||
                                  cell_a_[c] >= grid.hi - 1.01 * w_casc);

  if (fixed_kink && *fixed_kink > grid.lo && *fixed_kink < grid.hi) {
    kink_ = *fixed_kink;
    kink_cell_ = cell_of(kink_);
  }

  for (std::size_t c = 0; c < C; ++c) {
    cell_begin_.push_back(static_cast<int>(s_.size()));
    int gp = cell_cascade_[c] ? 4 : 2;
    // split at the node so every diagonal kink of a row integral falls on a
    // sub-cell boundary; all rows then share one static point set
    double brk[4] = {cell_a_[c], grid.nodes[c], cell_b_[c], cell_b_[c]};
    int nb = 3;
    if (static_cast<int>(c) == kink_cell_ && kink_ > cell_a_[c] && kink_ < cell_b_[c] &&
        kink_ != grid.nodes[c]) {
      brk[1] = std::min(grid.nodes[c], kink_);
      brk[2] = std::max(grid.nodes[c], kink_);
      brk[3] = cell_b_[c];
      nb = 4;
    }
    for (int q = 0; q + 1 < nb; ++q) emit_cell(brk[q], brk[q + 1], gp, s_, w_);
  }
  cell_begin_.push_back(static_cast<int>(s_.size()));

  if (staged) {
    // innermost cascade cells at each end drive the tail extrapolation
    lo_inner_[0] = 0;
    lo_inner_[1] = 1;
    hi_inner_[0] = static_cast<int>(C) - 1;
    hi_inner_[1] = static_cast<int>(C) - 2;
    tail_lo_ = 0.5 * (grid.lo + cell_a_.front());
    tail_hi_ = 0.5 * (grid.hi + cell_b_.back());
  }
}

double CellRule::interp(const std::vector<double>& v, double s) const {
  const auto& nodes = grid_->nodes;
  if (s <= nodes.front()) return v.front();
  if (s >= nodes.back()) return v.back();
  auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  double t0 = nodes[i - 1], t1 = nodes[i];
  double w = (s - t0) / (t1 - t0);
  return v[i - 1] + w * (v[i] - v[i - 1]);
}

namespace {

double cell_mass(const CellRule& rule, const std::vector<double>& pts,
                 const std::vector<double>& w, int begin, int end) {
  double m = 0.0;
  for (int q = begin; q < end; ++q) m += pts[q] * w[q];
  (void)rule;
  return m;
}

}  // namespace

void CellRule::set_tail_masses(LoadView& view) const {
  view.tail_mass_lo = view.tail_mass_hi = 0.0;
  if (lo_inner_[0] < 0) return;  // generic grids cover the whole interval
  // geometric extrapolation of the load mass below the innermost cell:
  // exact for power-law tails (mass ratio r^(1-p) per cascade step)
  auto tail = [&](int inner, int next) {
    double m1 = cell_mass(*this, *view.pts, w_, cell_begin_[inner],
                          cell_begin_[inner + 1]);
    double m2 =
        cell_mass(*this, *view.pts, w_, cell_begin_[next], cell_begin_[next + 1]);
    if (!(m1 > 0.0) || !(m2 > 0.0)) return 0.0;
    double rho = std::clamp(m1 / m2, 0.0, 0.95);
    return m1 * rho / (1.0 - rho);
  };
  view.tail_mass_lo = tail(lo_inner_[0], lo_inner_[1]);
  view.tail_mass_hi = tail(hi_inner_[0], hi_inner_[1]);
}

CellRule::RowResult CellRule::row(const KernelCtx& k, double t,
                                  const LoadView& load) const {
  Accum av, ad;
  // rows at grid nodes have their diagonal kink on a sub-cell boundary; only
  // off-node evaluation points need a dynamic split
  int split_cell = -1;
  if (k.has_diagonal_kink() && t > grid_->lo && t < grid_->hi) {
    int c = cell_of(t);
    if (t != grid_->nodes[c] && t > cell_a_[c] && t < cell_b_[c]) split_cell = c;
  }

  const std::vector<double>& load_pts = *load.pts;
  const int C = static_cast<int>(cell_begin_.size()) - 1;
  for (int c = 0; c < C; ++c) {
    if (c == split_cell) {
      double tc = t;
      double node = grid_->nodes[c];
      double brk[5] = {cell_a_[c], std::min(tc, node), std::max(tc, node),
                       cell_b_[c], cell_b_[c]};
      int nb = 4;
      if (c == kink_cell_ && kink_ > cell_a_[c] && kink_ < cell_b_[c]) {
        // rare: both the diagonal point and the fixed kink in one cell
        double pts3[3] = {tc, node, kink_};
        std::sort(pts3, pts3 + 3);
        brk[1] = pts3[0];
        brk[2] = pts3[1];
        brk[3] = pts3[2];
        brk[4] = cell_b_[c];
        nb = 5;
      }
      std::vector<double> ss, ww;
      ss.reserve(20);
      ww.reserve(20);
      int gp = cell_cascade_[c] ? 4 : 2;
      for (int q = 0; q + 1 < nb; ++q) emit_cell(brk[q], brk[q + 1], gp, ss, ww);
      for (std::size_t q = 0; q < ss.size(); ++q) {
        double L = load.at(ss[q]);
        av.add(k.value(t, ss[q]) * L * ww[q]);
        ad.add(k.dt(t, ss[q]) * L * ww[q]);
      }
    } else {
      for (int q = cell_begin_[c]; q < cell_begin_[c + 1]; ++q) {
        av.add(k.value(t, s_[q]) * load_pts[q] * w_[q]);
        ad.add(k.dt(t, s_[q]) * load_pts[q] * w_[q]);
      }
    }
  }
  if (load.tail_mass_lo > 0.0) {
    av.add(k.value(t, tail_lo_) * load.tail_mass_lo);
    ad.add(k.dt(t, tail_lo_) * load.tail_mass_lo);
  }
  if (load.tail_mass_hi > 0.0) {
    av.add(k.value(t, tail_hi_) * load.tail_mass_hi);
    ad.add(k.dt(t, tail_hi_) * load.tail_mass_hi);
  }
  return {av.get(), ad.get()};
}

double CellRule::total(const LoadView& load) const {
  Accum acc;
  const std::vector<double>& load_pts = *load.pts;
  for (std::size_t q = 0; q < s_.size(); ++q) acc.add(load_pts[q] * w_[q]);
  acc.add(load.tail_mass_lo);
  acc.add(load.tail_mass_hi);
  return acc.get();
}

// ---------------------------------------------------------------------------
// StageOperator

StageOperator::StageOperator(const ProblemSpec& prob, Grid grid, long n)
    : prob_(prob), grid_(std::move(grid)), n_(n) {
  const BoundarySpec& bc = prob.bc;
  const double lo = grid_.lo;
  const double hi = grid_.hi;

  auto fill_weight = [&](const Expr& w, std::vector<double>& out) {
    out.resize(grid_.size());
    for (std::size_t j = 0; j < grid_.size(); ++j)
      out[j] = w.empty() ? 1.0 : w.eval(Env::of_t(grid_.nodes[j]));
  };
  fill_weight(prob.p, pv_);
  fill_weight(prob.q, qv_);

  switch (bc.kind) {
    case BoundarySpec::Kind::ThreePoint:
      kx_ = ky_ = KernelCtx{KernelCtx::Id::ThreePoint, bc.alpha, 0, 0, bc.eta};
      break;
    case BoundarySpec::Kind::ThreePointTruncated:
      kx_ = ky_ = KernelCtx{KernelCtx::Id::ThreePointTruncated, bc.alpha, 0, 0,
                            bc.eta, 1, 1, lo, hi, n};
      sequential_ = true;  // T_n = A_n(B_n x)
      break;
    case BoundarySpec::Kind::FourPointCoupled:
      kx_ = KernelCtx{KernelCtx::Id::FourPointF, bc.alpha, bc.beta, bc.xi, bc.eta};
      kx_cross_ =
          KernelCtx{KernelCtx::Id::FourPointG, bc.alpha, bc.beta, bc.xi, bc.eta};
      // mirrored pair: swap (alpha, xi) <-> (beta, eta)
      ky_ = KernelCtx{KernelCtx::Id::FourPointF, bc.beta, bc.alpha, bc.eta, bc.xi};
      ky_cross_ =
          KernelCtx{KernelCtx::Id::FourPointG, bc.beta, bc.alpha, bc.eta, bc.xi};
      break;
    case BoundarySpec::Kind::DirichletNeumann:
    case BoundarySpec::Kind::HalfLineDirichlet:
      kx_ = ky_ = KernelCtx{KernelCtx::Id::Min, 0, 0, 0, 0, 1, 1, lo, hi};
      if (prob.regularization == Regularization::RetractionBox) {
        aff_cx_ = 0.0;
        aff_cy_ = 0.0;
      }
      break;
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      kx_ = KernelCtx{KernelCtx::Id::Robin, 0, 0, 0, 0, bc.a1, bc.b1, lo, hi};
      ky_ = KernelCtx{KernelCtx::Id::Robin, 0, 0, 0, 0, bc.a2, bc.b2, lo, hi};
      if (prob.regularization == Regularization::RetractionBox) {
        aff_cx_ = bc.b1 / bc.a1;
        aff_cy_ = bc.b2 / bc.a2;
      }
      break;
    case BoundarySpec::Kind::TwoPointCoupledRobin:
      kx_ = ky_ = KernelCtx{KernelCtx::Id::Min, 0, 0, 0, 0, 1, 1, lo, hi};
      cross_const_x_ = bc.b2 / bc.a2;
      cross_const_y_ = bc.b1 / bc.a1;
      if (prob.regularization == Regularization::RetractionBox) {
        aff_cx_ = bc.b2 / bc.a2;
        aff_cy_ = bc.b1 / bc.a1;
      }
      break;
    case BoundarySpec::Kind::DirichletDirichlet:
      kx_ = ky_ =
          KernelCtx{KernelCtx::Id::DirichletDirichlet, 0, 0, 0, 0, 1, 1, lo, hi};
      break;
  }

  rule_x_.emplace(grid_, kx_.fixed_kink());
  rule_y_.emplace(grid_, ky_.fixed_kink());
  if (kx_cross_) rule_xc_.emplace(grid_, kx_cross_->fixed_kink());
  if (ky_cross_) rule_yc_.emplace(grid_, ky_cross_->fixed_kink());

  auto fill_pts = [&](const Expr& w, const CellRule& rule, std::vector<double>& out) {
    const auto& pts = rule.points();
    out.resize(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q)
      out[q] = w.empty() ? 1.0 : w.eval(Env::of_t(pts[q]));
  };
  fill_pts(prob.p, *rule_x_, px_pts_);
  fill_pts(prob.q, *rule_y_, qy_pts_);
  if (rule_xc_) fill_pts(prob.q, *rule_xc_, qxc_pts_);
  if (rule_yc_) fill_pts(prob.p, *rule_yc_, pyc_pts_);
}

Env StageOperator::reg_env(double t, double xv, double yv, double dval) const {
  const double inv_n = 1.0 / static_cast<double>(n_);
  Env env;
  env.t = t;
  switch (prob_.regularization) {
    case Regularization::None:
      env.x = xv;
      env.y = yv;
      env.d = dval;
      break;
    case Regularization::ShiftState:
      env.x = std::max(xv + inv_n, inv_n);
      env.y = std::max(yv + inv_n, inv_n);
      env.d = dval;
      break;
    case Regularization::ShiftDerivative:
      env.x = xv + (t - grid_.lo + robin_cx()) * inv_n;
      env.y = yv + (t - grid_.lo + robin_cy()) * inv_n;
      env.d = std::fabs(dval) + inv_n;
      break;
    case Regularization::RetractionBox:
      env.x = std::clamp(xv, 0.0, prob_.cap_state);
      env.y = std::clamp(yv, 0.0, prob_.cap_state);
      env.d = std::clamp(dval, inv_n, prob_.cap_deriv);
      break;
  }
  return env;
}

double StageOperator::robin_cx() const {
  const BoundarySpec& bc = prob_.bc;
  switch (bc.kind) {
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      return bc.b1 / bc.a1;
    case BoundarySpec::Kind::TwoPointCoupledRobin:
      return bc.b2 / bc.a2;
    default:
      return 0.0;
  }
}

double StageOperator::robin_cy() const {
  const BoundarySpec& bc = prob_.bc;
  switch (bc.kind) {
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      return bc.b2 / bc.a2;
    case BoundarySpec::Kind::TwoPointCoupledRobin:
      return bc.b1 / bc.a1;
    default:
      return 0.0;
  }
}

double StageOperator::affine_x(double t) const {
  if (aff_cx_ < 0.0) return 0.0;
  return (t - grid_.lo + aff_cx_) / static_cast<double>(n_);
}

double StageOperator::affine_y(double t) const {
  if (aff_cy_ < 0.0) return 0.0;
  return (t - grid_.lo + aff_cy_) / static_cast<double>(n_);
}

double StageOperator::affine_dx() const {
  return aff_cx_ < 0.0 ? 0.0 : 1.0 / static_cast<double>(n_);
}

double StageOperator::affine_dy() const {
  return aff_cy_ < 0.0 ? 0.0 : 1.0 / static_cast<double>(n_);
}

CellRule::LoadView StageOperator::make_view(const CellRule& rule,
                                            const std::vector<double>& pts,
                                            const std::vector<double>& f_nodes,
                                            const Expr& weight) const {
  CellRule::LoadView view{&pts, &f_nodes, &weight, &rule, 0.0, 0.0};
  rule.set_tail_masses(view);
  return view;
}

StageOperator::Loads StageOperator::loads_for(const State& s) const {
  Loads loads;
  const std::size_t m = grid_.size();
  loads.fx.resize(m);
  loads.gy.resize(m);
  loads.fx_part.resize(m);
  loads.gy_part.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    Env eg = reg_env(grid_.nodes[j], s.x[j], s.y[j], s.dy[j]);
    loads.gy_part[j] = prob_.g.eval(eg);
    loads.gy[j] = qv_[j] * loads.gy_part[j];
    Env ef = reg_env(grid_.nodes[j], s.x[j], s.y[j], s.dx[j]);
    loads.fx_part[j] = prob_.f.eval(ef);
    loads.fx[j] = pv_[j] * loads.fx_part[j];
  }
  const auto& px = rule_x_->points();
  loads.fx_pts.resize(px.size());
  for (std::size_t q = 0; q < px.size(); ++q)
    loads.fx_pts[q] = px_pts_[q] * rule_x_->interp(loads.fx_part, px[q]);
  const auto& py = rule_y_->points();
  loads.gy_pts.resize(py.size());
  for (std::size_t q = 0; q < py.size(); ++q)
    loads.gy_pts[q] = qy_pts_[q] * rule_y_->interp(loads.gy_part, py[q]);
  return loads;
}

void StageOperator::fill_component(const KernelCtx& k, const CellRule& rule,
                                   const CellRule::LoadView& load,
                                   std::vector<double>& out_val,
                                   std::vector<double>& out_dt,
                                   bool parallel) const {
  const std::size_t m = grid_.size();
  out_val.resize(m);
  out_dt.resize(m);
#if defined(SBVP_HAVE_OPENMP)
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long i = 0; i < static_cast<long>(m); ++i) {
    auto r = rule.row(k, grid_.nodes[i], load);
    out_val[i] = r.value;
    out_dt[i] = r.derivative;
  }
#if !defined(SBVP_HAVE_OPENMP)
  (void)parallel;
#endif
}

State StageOperator::apply(const State& s, bool parallel) const {
  const std::size_t m = grid_.size();
  State out = State::zeros(m);

  // g load from the current state (nonlinearity factor at nodes; exact
  // weight at the rule points)
  std::vector<double> g_part(m), f_part(m);
  for (std::size_t j = 0; j < m; ++j) {
    Env env = reg_env(grid_.nodes[j], s.x[j], s.y[j], s.dy[j]);
    g_part[j] = prob_.g.eval(env);
  }
  const auto& py = rule_y_->points();
  std::vector<double> gy_pts(py.size());
  for (std::size_t q = 0; q < py.size(); ++q)
    gy_pts[q] = qy_pts_[q] * rule_y_->interp(g_part, py[q]);
  auto gy_view = make_view(*rule_y_, gy_pts, g_part, prob_.q);

  fill_component(ky_, *rule_y_, gy_view, out.y, out.dy, parallel);

  // f load; the truncated three-point composition feeds the fresh y through
  if (sequential_) {
    for (std::size_t j = 0; j < m; ++j) {
      Env env = reg_env(grid_.nodes[j], s.x[j], out.y[j], s.dx[j]);
      f_part[j] = prob_.f.eval(env);
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      Env env = reg_env(grid_.nodes[j], s.x[j], s.y[j], s.dx[j]);
      f_part[j] = prob_.f.eval(env);
    }
  }
  const auto& px = rule_x_->points();
  std::vector<double> fx_pts(px.size());
  for (std::size_t q = 0; q < px.size(); ++q)
    fx_pts[q] = px_pts_[q] * rule_x_->interp(f_part, px[q]);
  auto fx_view = make_view(*rule_x_, fx_pts, f_part, prob_.p);

  fill_component(kx_, *rule_x_, fx_view, out.x, out.dx, parallel);

  if (kx_cross_) {
    std::vector<double> cv, cd;
    const auto& pxc = rule_xc_->points();
    std::vector<double> gy_c(pxc.size());
    for (std::size_t q = 0; q < pxc.size(); ++q)
      gy_c[q] = qxc_pts_[q] * rule_xc_->interp(g_part, pxc[q]);
    auto gy_cv = make_view(*rule_xc_, gy_c, g_part, prob_.q);
    fill_component(*kx_cross_, *rule_xc_, gy_cv, cv, cd, parallel);
    for (std::size_t i = 0; i < m; ++i) {
      out.x[i] += cv[i];
      out.dx[i] += cd[i];
    }
    const auto& pyc = rule_yc_->points();
    std::vector<double> fx_c(pyc.size());
    for (std::size_t q = 0; q < pyc.size(); ++q)
      fx_c[q] = pyc_pts_[q] * rule_yc_->interp(f_part, pyc[q]);
    auto fx_cv = make_view(*rule_yc_, fx_c, f_part, prob_.p);
    fill_component(*ky_cross_, *rule_yc_, fx_cv, cv, cd, parallel);
    for (std::size_t i = 0; i < m; ++i) {
      out.y[i] += cv[i];
      out.dy[i] += cd[i];
    }
  }
  if (cross_const_x_ != 0.0 || cross_const_y_ != 0.0) {
    double ig = rule_y_->total(gy_view);
    double iff = rule_x_->total(fx_view);
    for (std::size_t i = 0; i < m; ++i) {
      out.x[i] += cross_const_x_ * ig;
      out.y[i] += cross_const_y_ * iff;
    }
  }

  if (aff_cx_ >= 0.0 || aff_cy_ >= 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      out.x[i] += affine_x(grid_.nodes[i]);
      out.dx[i] += affine_dx();
      out.y[i] += affine_y(grid_.nodes[i]);
      out.dy[i] += affine_dy();
    }
  }
  return out;
}

StageOperator::PointValues StageOperator::eval_at(const Loads& loads, double t) const {
  PointValues pv{0, 0, 0, 0};
  auto fx_view = make_view(*rule_x_, loads.fx_pts, loads.fx_part, prob_.p);
  auto gy_view = make_view(*rule_y_, loads.gy_pts, loads.gy_part, prob_.q);
  auto rx = rule_x_->row(kx_, t, fx_view);
  pv.x = rx.value + affine_x(t);
  pv.dx = rx.derivative + affine_dx();
  auto ry = rule_y_->row(ky_, t, gy_view);
  pv.y = ry.value + affine_y(t);
  pv.dy = ry.derivative + affine_dy();
  if (kx_cross_) {
    const auto& pxc = rule_xc_->points();
    std::vector<double> gy_c(pxc.size());
    for (std::size_t q = 0; q < pxc.size(); ++q)
      gy_c[q] = qxc_pts_[q] * rule_xc_->interp(loads.gy_part, pxc[q]);
    auto gy_cv = make_view(*rule_xc_, gy_c, loads.gy_part, prob_.q);
    auto rc = rule_xc_->row(*kx_cross_, t, gy_cv);
    pv.x += rc.value;
    pv.dx += rc.derivative;
    const auto& pyc = rule_yc_->points();
    std::vector<double> fx_c(pyc.size());
    for (std::size_t q = 0; q < pyc.size(); ++q)
      fx_c[q] = pyc_pts_[q] * rule_yc_->interp(loads.fx_part, pyc[q]);
    auto fx_cv = make_view(*rule_yc_, fx_c, loads.fx_part, prob_.p);
    auto rc2 = rule_yc_->row(*ky_cross_, t, fx_cv);
    pv.y += rc2.value;
    pv.dy += rc2.derivative;
  }
  if (cross_const_x_ != 0.0 || cross_const_y_ != 0.0) {
    pv.x += cross_const_x_ * rule_y_->total(gy_view);
    pv.y += cross_const_y_ * rule_x_->total(fx_view);
  }
  return pv;
}

}  // namespace nystrom
}  // namespace sbvp
