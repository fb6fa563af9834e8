#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sbvp/harness.hpp"

namespace sbvp {

namespace {

using nlohmann::json;
namespace hyp = hypotheses;

Expr want_expr(const json& params, const std::string& label, const char* key) {
  if (!params.contains(key) || !params[key].is_string())
    throw ConfigError("hypotheses." + label + "." + key + ": missing expression");
  try {
    return parse(params[key].get<std::string>());
  } catch (const ParseError& pe) {
    throw ConfigError("hypotheses." + label + "." + key + ": " + pe.what());
  }
}

Expr opt_expr(const json& params, const std::string& label, const char* key) {
  if (!params.contains(key)) return Expr();
  return want_expr(params, label, key);
}

double want_num(const json& params, const std::string& label, const char* key) {
  if (!params.contains(key) || !params[key].is_number())
    throw ConfigError("hypotheses." + label + "." + key + ": missing number");
  return params[key].get<double>();
}

double opt_num(const json& params, const char* key, double def) {
  return params.contains(key) && params[key].is_number() ? params[key].get<double>()
                                                         : def;
}

HypothesisReport merge(const std::string& label, const HypothesisReport& a,
                       const HypothesisReport& b) {
  HypothesisReport rep;
  rep.label = label;
  using V = HypothesisReport::Verdict;
  if (a.verdict == V::Fails || b.verdict == V::Fails)
    rep.verdict = V::Fails;
  else if (a.verdict == V::Inconclusive || b.verdict == V::Inconclusive)
    rep.verdict = V::Inconclusive;
  else
    rep.verdict = V::Holds;
  rep.margin = std::min(a.margin, b.margin);
  rep.witnesses = a.witnesses;
  rep.witnesses.insert(rep.witnesses.end(), b.witnesses.begin(), b.witnesses.end());
  rep.trending_unbounded = a.trending_unbounded || b.trending_unbounded;
  rep.notes = a.notes;
  if (!b.notes.empty()) rep.notes += (rep.notes.empty() ? "" : " | ") + b.notes;
  return rep;
}

double weight_integral(const Expr& w) {
  if (w.empty()) return 1.0;
  return integrate_refined([&](double t) { return w.eval(Env::of_t(t)); }, 0.0, 1.0,
                           2048, 4.0);
}

HypothesisReport finite_eval_check(const std::string& label, const Expr& f1,
                                   const Expr& f2, double t_hi) {
  HypothesisReport rep;
  rep.label = label;
  rep.verdict = HypothesisReport::Verdict::Holds;
  double mn = std::numeric_limits<double>::infinity();
  try {
    for (int k = 1; k <= 12; ++k) {
      double t = t_hi * k / 12.0;
      for (double s : {0.01, 0.5, 1.0})
        for (double d : {0.05, 0.5, 2.0}) {
          Env env = Env::of_t(t);
          env.x = s;
          env.y = s;
          env.d = d;
          mn = std::min({mn, f1.eval(env), f2.eval(env)});
        }
    }
    rep.margin = mn;
    rep.notes = "nonlinearities evaluate finitely on the sample grid";
  } catch (const EvalError& e) {
    rep.verdict = HypothesisReport::Verdict::Fails;
    rep.notes = std::string("evaluation failed: ") + e.what();
  }
  return rep;
}

HypothesisReport dispatch(const RunConfig& cfg, const HypothesisRequest& req) {
  const std::string& L = req.label;
  const json& P = req.params;
  const BoundarySpec& bc = cfg.problem.bc;

  if (L == "A1") {
    Expr w = parse("t*(1-t)");
    auto a = hyp::check_integrability(L, w, want_expr(P, L, "K"), 0.0, 1.0);
    auto b = hyp::check_integrability(L, w, want_expr(P, L, "L"), 0.0, 1.0);
    return merge(L, a, b);
  }
  if (L == "A2") {
    hyp::GrowthInputs gi;
    gi.fn = want_expr(P, L, "F");
    gi.exponent = want_num(P, L, "alpha1");
    auto a = hyp::check_growth(L, hyp::GrowthVariant::A2, gi);
    gi.fn = want_expr(P, L, "G");
    gi.exponent = want_num(P, L, "alpha2");
    auto b = hyp::check_growth(L, hyp::GrowthVariant::A2, gi);
    auto rep = merge(L, a, b);
    if (want_num(P, L, "alpha1") * want_num(P, L, "alpha2") > 1.0 + 1e-12) {
      rep.verdict = HypothesisReport::Verdict::Fails;
      rep.notes += " | exponent constraint alpha1*alpha2 <= 1 violated";
    }
    return rep;
  }
  if (L == "A3") {
    hyp::GrowthInputs gi;
    gi.window_lo = opt_num(P, "eta", bc.eta);
    gi.window_hi = 1.0;
    gi.fn = want_expr(P, L, "f");
    gi.exponent = want_num(P, L, "beta1");
    auto a = hyp::check_growth(L, hyp::GrowthVariant::A3, gi);
    gi.fn = want_expr(P, L, "g");
    gi.exponent = want_num(P, L, "beta2");
    auto b = hyp::check_growth(L, hyp::GrowthVariant::A3, gi);
    auto rep = merge(L, a, b);
    if (want_num(P, L, "beta1") * want_num(P, L, "beta2") < 1.0 - 1e-12) {
      rep.verdict = HypothesisReport::Verdict::Fails;
      rep.notes += " | exponent constraint beta1*beta2 >= 1 violated";
    }
    return rep;
  }
  if (L == "A4")
    return hyp::check_monotone_floor_A4(L, want_expr(P, L, "f"), want_expr(P, L, "G"),
                                        want_num(P, L, "b"), bc,
                                        std::max<long>(cfg.solver.n0,
                                                       bc.min_truncation_index()));
  if (L == "A5")
    return hyp::check_ceiling_A5(L, want_expr(P, L, "F"), want_expr(P, L, "g"),
                                 want_num(P, L, "a"), bc,
                                 std::max<long>(cfg.solver.n0,
                                                bc.min_truncation_index()));
  if (L == "A6") {
    Expr w = parse("t*(1-t)");
    Expr f = want_expr(P, L, "f");
    Expr g = want_expr(P, L, "g");
    auto sub = [&](const Expr& e) {
      return e.substitute(Var::X, w).substitute(Var::Y, w);
    };
    auto a = hyp::check_integrability(L, w, sub(f), 0.0, 1.0);
    auto b = hyp::check_integrability(L, w, sub(g), 0.0, 1.0);
    // monotonicity in both state slots
    hyp::ScalingInputs si{f, -5.0, 0.0, -5.0, 0.0};
    auto mono = hyp::check_scaling(L, si);
    (void)mono;  // scaling with alpha<=0<=beta covers nonincreasing behavior
    return merge(L, a, b);
  }
  if (L == "A7" || L == "A10") {
    hyp::ScalingInputs si;
    si.fn = want_expr(P, L, "f");
    si.alpha1 = want_num(P, L, "alpha1");
    si.beta1 = want_num(P, L, "beta1");
    si.alpha2 = want_num(P, L, "alpha2");
    si.beta2 = want_num(P, L, "beta2");
    return hyp::check_scaling(L, si);
  }
  if (L == "A8" || L == "A11") {
    hyp::ScalingInputs si;
    si.fn = want_expr(P, L, "g");
    si.alpha1 = want_num(P, L, "gamma1");
    si.beta1 = want_num(P, L, "rho1");
    si.alpha2 = want_num(P, L, "gamma2");
    si.beta2 = want_num(P, L, "rho2");
    return hyp::check_scaling(L, si);
  }
  if (L == "A9") {
    Expr w = parse("t*(1-t)");
    Expr one = Expr::constant(1.0);
    auto sub = [&](const Expr& e) {
      return e.substitute(Var::X, one).substitute(Var::Y, one);
    };
    auto a = hyp::check_integrability(L, w, sub(want_expr(P, L, "f")), 0.0, 1.0);
    auto b = hyp::check_integrability(L, w, sub(want_expr(P, L, "g")), 0.0, 1.0);
    return merge(L, a, b);
  }

  if (L == "B1") {
    auto a = hyp::check_integrability(L, Expr(), want_expr(P, L, "p"), 0.0, 1.0);
    auto b = hyp::check_integrability(L, Expr(), want_expr(P, L, "q"), 0.0, 1.0);
    return merge(L, a, b);
  }
  if (L == "B2") {
    auto a = hyp::check_positivity(L, want_expr(P, L, "f"), 1e-3, 1e3, 0.0, 1.0, true);
    auto b = hyp::check_positivity(L, want_expr(P, L, "g"), 1e-3, 1e3, 0.0, 1.0, true);
    return merge(L, a, b);
  }
  if (L == "B3" || L == "C3") {
    const char* fk = L == "C3" ? "f1" : "f";
    const char* gk = L == "C3" ? "f2" : "g";
    auto a = hyp::check_factored_bound(L, want_expr(P, L, fk), opt_expr(P, L, "h1"),
                                       want_expr(P, L, "k1"), want_expr(P, L, "u1"),
                                       opt_expr(P, L, "v1"), 0.0,
                                       L == "C3" ? 6.0 : 1.0, 1e3);
    auto b = hyp::check_factored_bound(L, want_expr(P, L, gk), opt_expr(P, L, "h2"),
                                       want_expr(P, L, "k2"), want_expr(P, L, "u2"),
                                       opt_expr(P, L, "v2"), 0.0,
                                       L == "C3" ? 6.0 : 1.0, 1e3);
    return merge(L, a, b);
  }
  if (L == "B4" || L == "B11" || L == "B14") {
    hyp::SupRatioInputs in;
    in.k1 = want_expr(P, L, "k1");
    in.k2 = want_expr(P, L, "k2");
    in.u1 = want_expr(P, L, "u1");
    in.v1 = opt_expr(P, L, "v1");
    in.u2 = want_expr(P, L, "u2");
    in.v2 = opt_expr(P, L, "v2");
    if (L == "B14") {
      in.h1 = want_expr(P, L, "h1");
      in.h2 = want_expr(P, L, "h2");
    }
    in.p_int = opt_num(P, "p_int", weight_integral(cfg.problem.p));
    in.q_int = opt_num(P, "q_int", weight_integral(cfg.problem.q));
    in.a1 = bc.a1;
    in.b1 = bc.b1;
    in.a2 = bc.a2;
    in.b2 = bc.b2;
    auto variant = L == "B4"    ? hyp::SupRatioVariant::B4
                   : L == "B11" ? hyp::SupRatioVariant::B11
                                : hyp::SupRatioVariant::B14;
    return hyp::check_sup_ratio(L, variant, in);
  }
  if (L == "B5" || L == "C5") {
    auto a = hyp::check_transform_unbounded(L, want_expr(P, L, "u1"),
                                            opt_expr(P, L, "v1"));
    auto b = hyp::check_transform_unbounded(L, want_expr(P, L, "u2"),
                                            opt_expr(P, L, "v2"));
    return merge(L, a, b);
  }
  if (L == "B6" || L == "B8") {
    hyp::LowerPowerInputs in;
    in.phi = want_expr(P, L, "phi");
    in.E = opt_num(P, "E", 1.0);
    in.F = L == "B8" ? 1e6 : opt_num(P, "F", 1.0);  // d-box unbounded for B8
    in.fn = want_expr(P, L, "f");
    in.delta = want_num(P, L, "delta1");
    auto a = hyp::check_lower_power(L, in);
    in.fn = want_expr(P, L, "g");
    in.phi = want_expr(P, L, "psi");
    in.delta = want_num(P, L, "delta2");
    auto b = hyp::check_lower_power(L, in);
    return merge(L, a, b);
  }
  if (L == "B7" || L == "B12" || L == "B13" || L == "B17") {
    hyp::WeightedIntegrabilityInputs in;
    in.with_s_power = (L == "B7" || L == "B17");
    in.p = want_expr(P, L, "p");
    in.u = want_expr(P, L, "u1");
    in.phi = want_expr(P, L, "phi");
    in.delta = opt_num(P, "delta1", 0.0);
    auto a = hyp::check_weighted_integrability(L, in);
    in.p = want_expr(P, L, "q");
    in.u = want_expr(P, L, "u2");
    in.phi = want_expr(P, L, "psi");
    in.delta = opt_num(P, "delta2", 0.0);
    auto b = hyp::check_weighted_integrability(L, in);
    return merge(L, a, b);
  }
  if (L == "B9") {
    auto a = hyp::check_inverse_argument_integrability(L, want_expr(P, L, "p"),
                                                       want_expr(P, L, "v1"));
    auto b = hyp::check_inverse_argument_integrability(L, want_expr(P, L, "q"),
                                                       want_expr(P, L, "v2"));
    hyp::WeightedIntegrabilityInputs in;
    in.with_s_power = true;
    in.p = want_expr(P, L, "p");
    in.u = want_expr(P, L, "u1");
    in.phi = want_expr(P, L, "phi");
    in.delta = opt_num(P, "delta1", 0.0);
    auto c = hyp::check_weighted_integrability(L, in);
    in.p = want_expr(P, L, "q");
    in.u = want_expr(P, L, "u2");
    in.phi = want_expr(P, L, "psi");
    in.delta = opt_num(P, "delta2", 0.0);
    auto d = hyp::check_weighted_integrability(L, in);
    return merge(L, merge(L, a, b), merge(L, c, d));
  }
  if (L == "B10") {
    hyp::GrowthInputs gi;
    gi.fn = want_expr(P, L, "h1");
    auto a = hyp::check_growth(L, hyp::GrowthVariant::B10, gi);
    gi.fn = want_expr(P, L, "h2");
    auto b = hyp::check_growth(L, hyp::GrowthVariant::B10, gi);
    return merge(L, a, b);
  }
  if (L == "B16" || L == "C7") {
    hyp::LowerPowerInputs in;
    in.two_powers = true;
    in.t_hi = L == "C7" ? 6.0 : 1.0;
    in.E = opt_num(P, "M", 1.0);
    in.F = opt_num(P, "M", 1.0);
    double dbox = opt_num(P, "L", opt_num(P, "M", 1.0));
    (void)dbox;
    in.fn = want_expr(P, L, L == "C7" ? "f1" : "f");
    in.phi = want_expr(P, L, "phi");
    in.gamma = want_num(P, L, "gamma1");
    in.delta = want_num(P, L, "delta1");
    auto a = hyp::check_lower_power(L, in);
    in.fn = want_expr(P, L, L == "C7" ? "f2" : "g");
    in.phi = want_expr(P, L, "psi");
    in.gamma = want_num(P, L, "gamma2");
    in.delta = want_num(P, L, "delta2");
    auto b = hyp::check_lower_power(L, in);
    return merge(L, a, b);
  }

  if (L == "C1") {
    double decay = opt_num(P, "decay", 1.0);
    auto a = hyp::check_integrability(L, Expr(), want_expr(P, L, "p1"), 0.0,
                                      std::numeric_limits<double>::infinity(), decay);
    auto b = hyp::check_integrability(L, Expr(), want_expr(P, L, "p2"), 0.0,
                                      std::numeric_limits<double>::infinity(), decay);
    return merge(L, a, b);
  }
  if (L == "C2")
    return finite_eval_check(L, want_expr(P, L, "f1"), want_expr(P, L, "f2"), 6.0);
  if (L == "C4" || L == "C8") {
    hyp::OmegaInputs in;
    in.h1 = want_expr(P, L, "h1");
    in.k1 = want_expr(P, L, "k1");
    in.u1 = want_expr(P, L, "u1");
    in.v1 = opt_expr(P, L, "v1");
    in.p1 = want_expr(P, L, "p1");
    in.h2 = want_expr(P, L, "h2");
    in.k2 = want_expr(P, L, "k2");
    in.u2 = want_expr(P, L, "u2");
    in.v2 = opt_expr(P, L, "v2");
    in.p2 = want_expr(P, L, "p2");
    in.decay_scale = opt_num(P, "decay", 1.0);
    in.robin_prefactors = (L == "C8");
    in.a1 = bc.a1;
    in.b1 = bc.b1;
    in.a2 = bc.a2;
    in.b2 = bc.b2;
    return hyp::check_omega(L, want_num(P, L, "M"), opt_num(P, "eps", 1e-4), in);
  }
  if (L == "C6") {
    double M = opt_num(P, "M", 1.0);
    auto a = hyp::check_positivity(L, want_expr(P, L, "f1"), 1e-3 * M, M, 0.0, 6.0,
                                   true);
    auto b = hyp::check_positivity(L, want_expr(P, L, "f2"), 1e-3 * M, M, 0.0, 6.0,
                                   true);
    return merge(L, a, b);
  }

  if (L == "B15")
    throw ConfigError("hypotheses.B15: the numbering has no B15 (the family jumps "
                      "from B14 to B16)");
  if (L >= "B18" && L <= "B25")
    throw ConfigError("hypotheses." + L +
                      ": the upper/lower-solution template runs as the combined "
                      "request label `B18-B25`");
  throw ConfigError("hypotheses." + L + ": unknown hypothesis label");
}

}  // namespace

std::vector<HypothesisReport> audit(const RunConfig& cfg) {
  std::vector<HypothesisReport> out;
  for (const HypothesisRequest& req : cfg.hypotheses) {
    if (req.label == "B18-B25") {
      hyp::UpperLowerInputs in;
      const json& P = req.params;
      in.p1 = want_expr(P, req.label, "p1");
      in.p2 = want_expr(P, req.label, "p2");
      in.f1 = want_expr(P, req.label, "f1");
      in.f2 = want_expr(P, req.label, "f2");
      in.upper1 = want_expr(P, req.label, "upper1");
      in.upper2 = want_expr(P, req.label, "upper2");
      in.lower1 = want_expr(P, req.label, "lower1");
      in.lower2 = want_expr(P, req.label, "lower2");
      in.h1 = want_expr(P, req.label, "h1");
      in.k1 = opt_expr(P, req.label, "k1");
      in.u1 = want_expr(P, req.label, "u1");
      in.v1 = opt_expr(P, req.label, "v1");
      in.psi1 = want_expr(P, req.label, "psi1");
      in.h2 = want_expr(P, req.label, "h2");
      in.k2 = opt_expr(P, req.label, "k2");
      in.u2 = want_expr(P, req.label, "u2");
      in.v2 = opt_expr(P, req.label, "v2");
      in.psi2 = want_expr(P, req.label, "psi2");
      in.rho_n0 = opt_num(P, "rho_n0", 1e-3);
      in.psi_decay = opt_num(P, "psi_decay", 1.0);
      auto reps = hyp::check_upper_lower_template(in);
      out.insert(out.end(), reps.begin(), reps.end());
      continue;
    }
    out.push_back(dispatch(cfg, req));
  }
  return out;
}

json report_to_json(const HypothesisReport& rep) {
  const char* verdict = rep.verdict == HypothesisReport::Verdict::Holds ? "holds"
                        : rep.verdict == HypothesisReport::Verdict::Fails
                            ? "fails"
                            : "inconclusive";
  json w = json::array();
  for (const auto& wit : rep.witnesses)
    w.push_back({{"point", wit.point}, {"value", wit.value}});
  return json{{"label", rep.label},          {"holds", verdict},
              {"margin", rep.margin},        {"witnesses", w},
              {"notes", rep.notes},          {"sup_unbounded", rep.trending_unbounded}};
}

json solution_to_json(const SolutionPair& sol) {
  json stages = json::array();
  for (const StageInfo& s : sol.diag.stages)
    stages.push_back({{"n", s.n},
                      {"iterations", s.iterations},
                      {"fp_residual", s.fp_residual},
                      {"stage_diff", s.stage_diff},
                      {"converged", s.converged}});
  json diag{{"n_final", sol.diag.n_final},
            {"fp_residual", sol.diag.fp_residual},
            {"ode_residual", sol.diag.ode_residual},
            {"bc_residual", sol.diag.bc_residual},
            {"positivity_ok", sol.diag.positivity_ok},
            {"cone_ok", sol.diag.cone_ok},
            {"converged", sol.diag.converged},
            {"reg_cauchy", sol.diag.reg_cauchy},
            {"stage_diff", sol.diag.stage_diff},
            {"flag", sol.diag.flag},
            {"stages", stages},
            {"boundary",
             {{"x_lo", sol.diag.x_lo},
              {"x_hi", sol.diag.x_hi},
              {"y_lo", sol.diag.y_lo},
              {"y_hi", sol.diag.y_hi},
              {"dx_lo", sol.diag.dx_lo},
              {"dx_hi", sol.diag.dx_hi},
              {"dy_lo", sol.diag.dy_lo},
              {"dy_hi", sol.diag.dy_hi}}}};
  if (sol.diag.m_final > 0) {
    diag["m_final"] = sol.diag.m_final;
    diag["tail"] = sol.diag.tail;
    diag["compact_diff"] = sol.diag.compact_diff;
  }
  return json{{"grid", sol.grid.nodes}, {"x", sol.x},    {"y", sol.y},
              {"dx", sol.dx},           {"dy", sol.dy},  {"diagnostics", diag}};
}

std::string solution_to_csv(const SolutionPair& sol) {
  std::string out = "t,x,y,dx,dy\n";
  char buf[256];
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  sol.grid.nodes[i], sol.x[i], sol.y[i], sol.dx[i], sol.dy[i]);
    out += buf;
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write to `" + tmp + "`");
    out << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename `" + tmp + "` to `" + path + "`");
}

std::string default_output_dir() {
  const char* env = std::getenv("SBVP_OUTPUT_DIR");
  return env && *env ? env : ".";
}

json RunResult::to_json() const {
  json j;
  j["status"] = static_cast<int>(status);
  j["message"] = message;
  json reps = json::array();
  for (const HypothesisReport& r : reports) reps.push_back(report_to_json(r));
  j["hypotheses"] = reps;
  if (solution) j["solution"] = solution_to_json(*solution);
  return j;
}

RunResult run(const RunConfig& cfg, bool solve_problem) {
  RunResult result;
  try {
    result.reports = audit(cfg);
  } catch (const ConfigError&) {
    throw;  // config-level problem: surface to the caller
  } catch (const std::exception& e) {
    result.status = RunStatus::NumericError;
    result.message = std::string("hypothesis audit failed: ") + e.what();
  }

  if (solve_problem && result.status == RunStatus::Converged) {
    try {
      SolutionPair sol;
      if (cfg.problem.halfline)
        sol = halfline::diagonalize(cfg.problem, cfg.halfline_schedule, cfg.solver);
      else
        sol = solve_regularized(cfg.problem, cfg.solver);
      ProblemSpec stage = cfg.problem;
      if (stage.halfline) {
        stage.halfline = false;
        stage.lo = sol.grid.lo;
        stage.hi = sol.grid.hi;
      }
      residual(stage, sol);
      if (!sol.diag.converged) {
        result.status = sol.diag.flag.find("domain error") != std::string::npos
                            ? RunStatus::NumericError
                            : RunStatus::NotConverged;
        result.message = sol.diag.flag;
      }
      result.solution = std::move(sol);
    } catch (const EvalError& e) {
      result.status = RunStatus::NumericError;
      result.message = std::string("domain error: ") + e.what();
    } catch (const KernelError& e) {
      result.status = RunStatus::NumericError;
      result.message = e.what();
    } catch (const QuadratureError& e) {
      result.status = RunStatus::NumericError;
      result.message = e.what();
    }
  }

  if (!cfg.output_path.empty()) {
    if (cfg.output_format == "csv" && result.solution) {
      write_file_atomic(cfg.output_path, solution_to_csv(*result.solution));
    } else {
      json j = result.to_json();
      j["config"] = cfg.to_json();
      write_file_atomic(cfg.output_path, j.dump(2) + "\n");
    }
  }
  return result;
}

}  // namespace sbvp
