#include "sbvp/solver.hpp"

#include <algorithm>
#include <cmath>

namespace sbvp {

using nystrom::StageOperator;

namespace {

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double sup_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

Grid stage_grid(const ProblemSpec& prob, long n, const SolverOptions& opts) {
  if (prob.bc.kind == BoundarySpec::Kind::ThreePointTruncated) {
    double l = 1.0 / static_cast<double>(n);
    return nystrom::stage_mesh(l, 1.0 - l, opts.N);
  }
  return nystrom::stage_mesh(prob.lo, prob.hi, opts.N);
}

State initial_state(const Grid& g, const SolverOptions& opts, double ramp_scale) {
  State s = State::zeros(g.size());
  if (opts.init == SolverOptions::Init::Zero) return s;
  if (opts.init == SolverOptions::Init::Supplied && opts.supplied.size() == g.size())
    return opts.supplied;
  const double w = g.hi - g.lo;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = (g.nodes[i] - g.lo) / w;
    s.x[i] = s.y[i] = ramp_scale * r;
    s.dx[i] = s.dy[i] = ramp_scale / w;
  }
  return s;
}

void fill_boundary_values(const StageOperator& op, const State& st,
                          SolutionPair& sol) {
  try {
    auto loads = op.loads_for(st);
    auto lo = op.eval_at(loads, op.stage_lo());
    auto hi = op.eval_at(loads, op.stage_hi());
    sol.diag.x_lo = lo.x;
    sol.diag.y_lo = lo.y;
    sol.diag.dx_lo = lo.dx;
    sol.diag.dy_lo = lo.dy;
    sol.diag.x_hi = hi.x;
    sol.diag.y_hi = hi.y;
    sol.diag.dx_hi = hi.dx;
    sol.diag.dy_hi = hi.dy;
  } catch (const EvalError&) {
    // a failed stage may hold states outside the nonlinearity's domain;
    // boundary values stay at zero in that case
  }
}

}  // namespace

double interp_linear(const Grid& g, const std::vector<double>& v, double t,
                     double left_value, double right_value) {
  if (t <= g.nodes.front()) {
    if (t <= g.lo) return left_value;
    // blend between the boundary value and the first node
    double w = (t - g.lo) / (g.nodes.front() - g.lo);
    return left_value + w * (v.front() - left_value);
  }
  if (t >= g.nodes.back()) {
    if (t >= g.hi) return right_value;
    double w = (t - g.nodes.back()) / (g.hi - g.nodes.back());
    return v.back() + w * (right_value - v.back());
  }
  auto it = std::upper_bound(g.nodes.begin(), g.nodes.end(), t);
  std::size_t i = static_cast<std::size_t>(it - g.nodes.begin());
  double t0 = g.nodes[i - 1], t1 = g.nodes[i];
  double w = (t - t0) / (t1 - t0);
  return v[i - 1] + w * (v[i] - v[i - 1]);
}

State apply_T(const ProblemSpec& prob, const Grid& grid, long n, const State& s,
              bool parallel) {
  StageOperator op(prob, grid, n);
  return op.apply(s, parallel);
}

SolutionPair fixed_point(const ProblemSpec& prob, const Grid& grid, long n,
                         const State& init, const SolverOptions& opts) {
  StageOperator op(prob, grid, n);
  SolutionPair sol;
  sol.grid = grid;
  sol.diag.n_final = n;

  State cur = init;
  State best = init;
  double best_res = std::numeric_limits<double>::infinity();
  int iters = 0;

  for (iters = 1; iters <= opts.max_iter; ++iters) {
    State img;
    try {
      img = op.apply(cur, opts.parallel);
    } catch (const EvalError& e) {
      sol.diag.flag = std::string("domain error: ") + e.what();
      break;
    } catch (const QuadratureError& e) {
      sol.diag.flag = std::string("numeric error: ") + e.what();
      break;
    }
    double res = std::max(sup_abs_diff(img.x, cur.x), sup_abs_diff(img.y, cur.y));
    if (!std::isfinite(res) ||
        std::max(sup_abs(img.x), sup_abs(img.y)) > opts.divergence_cap) {
      sol.diag.flag = "divergence: state norm exceeded cap";
      break;
    }
    if (res < best_res) {
      best_res = res;
      best = img;
    }
    if (res <= opts.tol_fp) {
      cur = img;
      sol.diag.converged = true;
      break;
    }
    for (std::size_t i = 0; i < cur.size(); ++i) {
      cur.x[i] += opts.omega * (img.x[i] - cur.x[i]);
      cur.y[i] += opts.omega * (img.y[i] - cur.y[i]);
      cur.dx[i] += opts.omega * (img.dx[i] - cur.dx[i]);
      cur.dy[i] += opts.omega * (img.dy[i] - cur.dy[i]);
    }
  }

  const State& out = sol.diag.converged ? cur : best;
  sol.x = out.x;
  sol.y = out.y;
  sol.dx = out.dx;
  sol.dy = out.dy;
  sol.diag.fp_residual = best_res;
  sol.diag.stages.push_back(
      {n, iters, sol.diag.fp_residual, std::numeric_limits<double>::infinity(),
       sol.diag.converged});
  if (!sol.diag.converged && sol.diag.flag.empty())
    sol.diag.flag = "fixed point: max_iter reached";
  fill_boundary_values(op, out, sol);
  return sol;
}

namespace {

// Constant-extension evaluation of a stage solution on the full interval.
struct Extension {
  const SolutionPair* sol;
  double left_x, right_x, left_y, right_y;

  double x(double t) const {
    return interp_linear(sol->grid, sol->x, t, left_x, right_x);
  }
  double y(double t) const {
    return interp_linear(sol->grid, sol->y, t, left_y, right_y);
  }
  double dx(double t) const {
    if (t <= sol->grid.lo || t >= sol->grid.hi) return 0.0;
    return interp_linear(sol->grid, sol->dx, t, sol->diag.dx_lo, sol->diag.dx_hi);
  }
  double dy(double t) const {
    if (t <= sol->grid.lo || t >= sol->grid.hi) return 0.0;
    return interp_linear(sol->grid, sol->dy, t, sol->diag.dy_lo, sol->diag.dy_hi);
  }
};

Extension make_extension(const SolutionPair& sol) {
  return Extension{&sol, sol.diag.x_lo, sol.diag.x_hi, sol.diag.y_lo, sol.diag.y_hi};
}

}  // namespace

SolutionPair solve_regularized(const ProblemSpec& prob, const SolverOptions& opts) {
  prob.validate();
  if (!std::isfinite(prob.hi))
    throw KernelError("half-line problems go through the diagonalization driver");
  long n = opts.n0 > 0 ? opts.n0 : std::max(prob.bc.min_truncation_index(), 4L);
  if (prob.bc.kind == BoundarySpec::Kind::ThreePointTruncated)
    n = std::max(n, prob.bc.min_truncation_index());

  SolutionPair prev;
  bool have_prev = false;
  std::vector<StageInfo> stages;
  const bool single_stage = prob.regularization == Regularization::None;

  while (true) {
    BoundarySpec bc = prob.bc;
    if (bc.kind == BoundarySpec::Kind::ThreePointTruncated) bc.n = n;
    ProblemSpec stage_prob = prob;
    stage_prob.bc = bc;

    Grid grid = stage_grid(stage_prob, n, opts);

    State init;
    if (have_prev) {
      Extension ext = make_extension(prev);
      init = State::zeros(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid.nodes[i];
        init.x[i] = ext.x(t);
        init.y[i] = ext.y(t);
        init.dx[i] = ext.dx(t);
        init.dy[i] = ext.dy(t);
      }
    } else {
      init = initial_state(grid, opts, opts.ramp_scale);
    }

    // intermediate stages may iterate to a slightly looser residual; the
    // returned stage is always solved to the full tolerance
    SolverOptions stage_opts = opts;
    SolutionPair cur = fixed_point(stage_prob, grid, n, init, stage_opts);
    StageInfo info = cur.diag.stages.back();

    if (!cur.diag.converged) {
      // stage failed: report the last good stage if any, else the failure
      if (have_prev) {
        prev.diag.stages = stages;
        prev.diag.stages.push_back(info);
        prev.diag.flag = "continuation stopped at n=" + std::to_string(n) + " (" +
                         (cur.diag.flag.empty() ? "no convergence" : cur.diag.flag) +
                         ")";
        prev.diag.reg_cauchy = false;
        return prev;
      }
      cur.diag.stages = {info};
      return cur;
    }

    if (have_prev) {
      Extension ext = make_extension(prev);
      double diff = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid.nodes[i];
        diff = std::max(diff, std::fabs(cur.x[i] - ext.x(t)));
        diff = std::max(diff, std::fabs(cur.y[i] - ext.y(t)));
      }
      info.stage_diff = diff;
      cur.diag.stage_diff = diff;
      stages.push_back(info);
      cur.diag.stages = stages;
      if (diff < opts.tol_reg) {
        cur.diag.reg_cauchy = true;
        return cur;
      }
      // plateau: the truncated-domain schemes converge like n^(-1/2) at
      // best, so stalled stage differences will not reach tol_reg
      std::size_t k = stages.size();
      if (k >= 4 && stages[k - 1].stage_diff > 0.7 * stages[k - 3].stage_diff) {
        cur.diag.flag = "continuation stalled: stage differences plateaued at " +
                        std::to_string(diff);
        cur.diag.reg_cauchy = false;
        return cur;
      }
    } else {
      stages.push_back(info);
      cur.diag.stages = stages;
      if (single_stage) {
        cur.diag.reg_cauchy = true;
        cur.diag.stage_diff = 0.0;
        return cur;
      }
    }

    prev = std::move(cur);
    have_prev = true;

    long next = static_cast<long>(std::ceil(static_cast<double>(n) * opts.n_growth));
    if (next <= n) next = n + 1;
    if (next > opts.n_max) {
      prev.diag.flag = "continuation reached n_max without stage agreement";
      prev.diag.reg_cauchy = false;
      return prev;
    }
    n = next;
  }
}

Cone chapter_cone(const ProblemSpec& prob) {
  switch (prob.bc.kind) {
    case BoundarySpec::Kind::ThreePointTruncated:
      return Cone::NonnegConcave;
    case BoundarySpec::Kind::ThreePoint:
      return Cone::TtGamma;
    case BoundarySpec::Kind::FourPointCoupled:
      return Cone::MinWindowGamma;
    case BoundarySpec::Kind::DirichletNeumann:
      return Cone::TWeighted;
    case BoundarySpec::Kind::RobinNeumann:
      return Cone::RobinGamma;
    case BoundarySpec::Kind::TwoPointCoupledRobin:
    case BoundarySpec::Kind::DirichletDirichlet:
    case BoundarySpec::Kind::HalfLineDirichlet:
    case BoundarySpec::Kind::HalfLineRobin:
      return Cone::NonnegConcave;
  }
  return Cone::NonnegConcave;
}

const char* cone_name(Cone c) {
  switch (c) {
    case Cone::NonnegConcave: return "nonneg_concave";
    case Cone::TWeighted: return "t_weighted";
    case Cone::TtGamma: return "tt_gamma";
    case Cone::MinWindowGamma: return "min_window_gamma";
    case Cone::RobinGamma: return "robin_gamma";
  }
  return "?";
}

namespace {

constexpr double kConeSlack = 1e-9;

bool check_component(const SolutionPair& sol, const std::vector<double>& v,
                     const std::vector<double>& dv, double anchor, double dv_sup,
                     const BoundarySpec& bc, Cone cone, bool first_component) {
  const Grid& g = sol.grid;
  const double norm = sup_abs(v);
  switch (cone) {
    case Cone::NonnegConcave: {
      for (double vi : v)
        if (vi < -kConeSlack) return false;
      // concavity via the derivative array (quadrature-accurate at every
      // node) ...
      double dnorm = sup_abs(dv);
      for (std::size_t i = 1; i < dv.size(); ++i)
        if (dv[i] > dv[i - 1] + kConeSlack * std::max(1.0, dnorm)) return false;
      // ... plus second differences where the stencil resolves the distance
      // to the (possibly singular) ends
      for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        double h1 = g.nodes[i] - g.nodes[i - 1];
        double h2 = g.nodes[i + 1] - g.nodes[i];
        double dist = std::min(g.nodes[i] - g.lo, g.hi - g.nodes[i]);
        if (std::max(h1, h2) > 0.2 * dist) continue;
        double dd = 2.0 * (v[i - 1] * h2 - v[i] * (h1 + h2) + v[i + 1] * h1) /
                    (h1 * h2 * (h1 + h2));
        // rounding of the divided difference grows like eps*|v|/h^2
        double fd_noise = 64.0 * 1e-16 * std::max(1.0, norm) / (h1 * h2);
        if (dd > kConeSlack + fd_noise) return false;
      }
      return true;
    }
    case Cone::TWeighted: {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < g.nodes[i] * norm - kConeSlack) return false;
      double norm1 = 0.0;
      for (std::size_t i = 0; i < dv.size(); ++i)
        norm1 = std::max(norm1, g.nodes[i] * std::fabs(dv[i]));
      return anchor >= norm1 - kConeSlack;  // anchor carries x(1)
    }
    case Cone::TtGamma: {
      double gamma = std::min(1.0, bc.alpha) * std::min(bc.eta, 1.0 - bc.eta) /
                     std::max(1.0, bc.alpha);
      for (std::size_t i = 0; i < v.size(); ++i) {
        double t = g.nodes[i];
        if (v[i] < t * (1.0 - t) * gamma * norm - kConeSlack) return false;
      }
      return true;
    }
    case Cone::MinWindowGamma: {
      double den = 1.0 - bc.alpha * bc.beta * bc.xi * bc.eta;
      double gamma =
          std::min({1.0, bc.alpha * bc.xi, bc.alpha * bc.beta * bc.xi,
                    bc.beta * bc.eta, bc.alpha * bc.beta * bc.eta}) *
          std::min({bc.xi, bc.eta, 1.0 - bc.xi, 1.0 - bc.eta}) /
          std::max({1.0, bc.alpha, bc.beta, bc.alpha * bc.beta * bc.xi,
                    bc.alpha * bc.beta * bc.eta});
      (void)den;
      double window_lo = std::max(bc.xi, bc.eta);
      double min_in_window = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < v.size(); ++i)
        if (g.nodes[i] >= window_lo) min_in_window = std::min(min_in_window, v[i]);
      return min_in_window >= gamma * norm - kConeSlack;
    }
    case Cone::RobinGamma: {
      double a = first_component ? bc.a1 : bc.a2;
      double b = first_component ? bc.b1 : bc.b2;
      double gamma = b / (a + b);
      for (double vi : v)
        if (vi < gamma * norm - kConeSlack) return false;
      return anchor >= (b / a) * dv_sup - kConeSlack;  // anchor carries x(0)
    }
  }
  return false;
}

}  // namespace

bool verify_cone(const SolutionPair& sol, const BoundarySpec& bc, Cone cone) {
  double dx_sup = sup_abs(sol.dx);
  double dy_sup = sup_abs(sol.dy);
  double x_anchor = cone == Cone::TWeighted ? sol.diag.x_hi : sol.diag.x_lo;
  double y_anchor = cone == Cone::TWeighted ? sol.diag.y_hi : sol.diag.y_lo;
  return check_component(sol, sol.x, sol.dx, x_anchor, dx_sup, bc, cone, true) &&
         check_component(sol, sol.y, sol.dy, y_anchor, dy_sup, bc, cone, false);
}

ResidualReport residual(const ProblemSpec& prob, SolutionPair& sol) {
  ResidualReport rep;
  const Grid& g = sol.grid;
  if (g.size() < 5) throw KernelError("residual: grid too small");

  BoundarySpec bc = prob.bc;
  long n = std::max(sol.diag.n_final, 1L);
  if (bc.kind == BoundarySpec::Kind::ThreePointTruncated) bc.n = n;
  ProblemSpec stage_prob = prob;
  stage_prob.bc = bc;
  StageOperator op(stage_prob, g, n);
  auto loads = op.loads_for(State{sol.x, sol.y, sol.dx, sol.dy});

  // refresh the boundary values from the operator representation
  {
    auto lo_v = op.eval_at(loads, g.lo);
    auto hi_v = op.eval_at(loads, g.hi);
    sol.diag.x_lo = lo_v.x;
    sol.diag.y_lo = lo_v.y;
    sol.diag.dx_lo = lo_v.dx;
    sol.diag.dy_lo = lo_v.dy;
    sol.diag.x_hi = hi_v.x;
    sol.diag.y_hi = hi_v.y;
    sol.diag.dx_hi = hi_v.dx;
    sol.diag.dy_hi = hi_v.dy;
  }

  // ODE residual: |D2 u + load| / (1 + |load|) at interior nodes. The
  // second central difference on a nonuniform stencil carries a known
  // truncation defect in x''' and x''''; since x'' = -load along a solution,
  // both defect terms are removed with divided differences of the load
  // itself (deferred correction). Nodes one-sided of the singular ends where
  // the stencil cannot resolve the distance are skipped, as are nodes at
  // mesh-width jumps.
  double worst = 0.0;
  auto d2_check = [&](const std::vector<double>& v, const std::vector<double>& load) {
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      double h1 = g.nodes[i] - g.nodes[i - 1];
      double h2 = g.nodes[i + 1] - g.nodes[i];
      double dist = std::min(g.nodes[i] - g.lo, g.hi - g.nodes[i]);
      if (dist < (g.hi - g.lo) / 6.0) continue;  // one-sided endpoint skip
      if (std::max(h1, h2) > 0.2 * dist) continue;
      if (std::max(h1, h2) > 1.5 * std::min(h1, h2)) continue;  // width jump
      double dd = 2.0 * (v[i - 1] * h2 - v[i] * (h1 + h2) + v[i + 1] * h1) /
                  (h1 * h2 * (h1 + h2));
      double ld1 = (load[i + 1] - load[i - 1]) / (h1 + h2);
      double ld2 = 2.0 *
                   (load[i - 1] * h2 - load[i] * (h1 + h2) + load[i + 1] * h1) /
                   (h1 * h2 * (h1 + h2));
      double correction =
          (h2 - h1) / 3.0 * ld1 + (h1 * h1 - h1 * h2 + h2 * h2) / 12.0 * ld2;
      double r = std::fabs(dd + load[i] + correction) / (1.0 + std::fabs(load[i]));
      worst = std::max(worst, r);
    }
  };
  d2_check(sol.x, loads.fx);
  d2_check(sol.y, loads.gy);
  rep.ode_residual = worst;

  // boundary-condition residual of the stage system
  const double inv_n = 1.0 / static_cast<double>(n);
  auto at = [&](double t) { return op.eval_at(loads, t); };
  double bcres = 0.0;
  auto acc = [&](double r) { bcres = std::max(bcres, std::fabs(r)); };
  const double right_target =
      prob.regularization == Regularization::RetractionBox ? inv_n : 0.0;
  switch (bc.kind) {
    case BoundarySpec::Kind::ThreePoint:
    case BoundarySpec::Kind::ThreePointTruncated: {
      auto e = at(bc.eta);
      acc(sol.diag.x_lo);
      acc(sol.diag.y_lo);
      acc(sol.diag.x_hi - bc.alpha * e.x);
      acc(sol.diag.y_hi - bc.alpha * e.y);
      break;
    }
    case BoundarySpec::Kind::FourPointCoupled: {
      auto exi = at(bc.xi);
      auto eeta = at(bc.eta);
      acc(sol.diag.x_lo);
      acc(sol.diag.y_lo);
      acc(sol.diag.x_hi - bc.alpha * exi.y);
      acc(sol.diag.y_hi - bc.beta * eeta.x);
      break;
    }
    case BoundarySpec::Kind::DirichletNeumann:
    case BoundarySpec::Kind::HalfLineDirichlet:
      acc(sol.diag.x_lo);
      acc(sol.diag.y_lo);
      acc(sol.diag.dx_hi - right_target);
      acc(sol.diag.dy_hi - right_target);
      break;
    case BoundarySpec::Kind::RobinNeumann:
    case BoundarySpec::Kind::HalfLineRobin:
      acc(bc.a1 * sol.diag.x_lo - bc.b1 * sol.diag.dx_lo);
      acc(bc.a2 * sol.diag.y_lo - bc.b2 * sol.diag.dy_lo);
      acc(sol.diag.dx_hi - right_target);
      acc(sol.diag.dy_hi - right_target);
      break;
    case BoundarySpec::Kind::TwoPointCoupledRobin:
      acc(bc.a1 * sol.diag.y_lo - bc.b1 * sol.diag.dx_lo);
      acc(bc.a2 * sol.diag.x_lo - bc.b2 * sol.diag.dy_lo);
      acc(sol.diag.dx_hi - right_target);
      acc(sol.diag.dy_hi - right_target);
      break;
    case BoundarySpec::Kind::DirichletDirichlet:
      acc(sol.diag.x_lo);
      acc(sol.diag.y_lo);
      acc(sol.diag.x_hi);
      acc(sol.diag.y_hi);
      break;
  }
  rep.bc_residual = bcres;

  rep.positivity_ok = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.nodes[i] <= g.lo || g.nodes[i] >= g.hi) continue;
    if (!(sol.x[i] > 0.0) || !(sol.y[i] > 0.0)) {
      rep.positivity_ok = false;
      break;
    }
  }

  rep.cone_ok = verify_cone(sol, bc, chapter_cone(prob));

  sol.diag.ode_residual = rep.ode_residual;
  sol.diag.bc_residual = rep.bc_residual;
  sol.diag.positivity_ok = rep.positivity_ok;
  sol.diag.cone_ok = rep.cone_ok;
  return rep;
}

std::vector<SolutionPair> solve_multi(const ProblemSpec& prob,
                                      const SolverOptions& opts) {
  std::vector<SolutionPair> out;
  SolverOptions o1 = opts;
  o1.init = SolverOptions::Init::Zero;
  SolverOptions o2 = opts;
  o2.init = SolverOptions::Init::AffineRamp;
  o2.ramp_scale = opts.multi_ramp_scale;

  for (const SolverOptions* o : {&o1, &o2}) {
    SolutionPair sp = solve_regularized(prob, *o);
    if (!sp.diag.converged) continue;
    bool dup = false;
    for (const SolutionPair& have : out) {
      if (have.grid.size() != sp.grid.size()) continue;
      double d = std::max(sup_abs_diff(have.x, sp.x), sup_abs_diff(have.y, sp.y));
      if (d <= 1e-3) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(sp));
  }
  std::sort(out.begin(), out.end(), [](const SolutionPair& a, const SolutionPair& b) {
    return sup_abs(a.x) + sup_abs(a.y) < sup_abs(b.x) + sup_abs(b.y);
  });
  return out;
}

}  // namespace sbvp
