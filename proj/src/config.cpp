#include <fstream>
#include <sstream>

#include "sbvp/harness.hpp"

namespace sbvp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double num_at(const json& j, const std::string& path, const std::string& key,
              std::optional<double> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    fail(path + "." + key, "missing required number");
  }
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

Expr expr_at(const json& j, const std::string& path, const std::string& key,
             bool required = true) {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required expression");
    return Expr();
  }
  if (!j[key].is_string()) fail(path + "." + key, "expected an expression string");
  try {
    return parse(j[key].get<std::string>());
  } catch (const ParseError& pe) {
    fail(path + "." + key, std::string("expression parse error: ") + pe.what());
  }
}

BoundarySpec::Kind bc_kind_from(const std::string& s, const std::string& path) {
  using K = BoundarySpec::Kind;
  static const std::pair<const char*, K> table[] = {
      {"three_point", K::ThreePoint},
      {"three_point_truncated", K::ThreePointTruncated},
      {"four_point_coupled", K::FourPointCoupled},
      {"dirichlet_neumann", K::DirichletNeumann},
      {"robin_neumann", K::RobinNeumann},
      {"two_point_coupled_robin", K::TwoPointCoupledRobin},
      {"dirichlet_dirichlet", K::DirichletDirichlet},
      {"half_line_dirichlet", K::HalfLineDirichlet},
      {"half_line_robin", K::HalfLineRobin},
  };
  for (auto& [name, kind] : table)
    if (s == name) return kind;
  fail(path, "unknown boundary family `" + s + "`");
}

Regularization reg_from(const std::string& s, const std::string& path) {
  if (s == "none") return Regularization::None;
  if (s == "shift_state") return Regularization::ShiftState;
  if (s == "shift_derivative") return Regularization::ShiftDerivative;
  if (s == "retraction_box") return Regularization::RetractionBox;
  fail(path, "unknown regularization `" + s + "`");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

void parse_interval(const json& j, const std::string& path, ProblemSpec& prob) {
  auto parse_bound = [&](const json& v, bool upper) -> double {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity") {
        if (!upper) fail(path, "lower bound cannot be infinite");
        return std::numeric_limits<double>::infinity();
      }
      try {
        return std::stod(s);
      } catch (...) {
        fail(path, "bad interval bound `" + s + "`");
      }
    }
    fail(path, "interval bounds must be numbers or \"inf\"");
  };
  if (j.is_array() && j.size() == 2) {
    prob.lo = parse_bound(j[0], false);
    prob.hi = parse_bound(j[1], true);
  } else if (j.is_string()) {
    // forms like "[0, 1]" and "[0, inf)"
    std::string s = j.get<std::string>();
    std::string inner = s;
    if (!inner.empty() && (inner.front() == '[' || inner.front() == '('))
      inner = inner.substr(1);
    if (!inner.empty() && (inner.back() == ']' || inner.back() == ')'))
      inner.pop_back();
    auto comma = inner.find(',');
    if (comma == std::string::npos) fail(path, "bad interval string `" + s + "`");
    auto trim = [](std::string v) {
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front())))
        v.erase(v.begin());
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back())))
        v.pop_back();
      return v;
    };
    prob.lo = parse_bound(json(trim(inner.substr(0, comma))), false);
    std::string hi = trim(inner.substr(comma + 1));
    prob.hi = (hi == "inf" || hi == "infinity")
                  ? std::numeric_limits<double>::infinity()
                  : parse_bound(json(hi), true);
  } else {
    fail(path, "interval must be a 2-array or a string");
  }
  prob.halfline = !std::isfinite(prob.hi);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  check_keys(j, "config", {"problem", "solver", "hypotheses", "output"});
  if (!j.contains("problem")) throw ConfigError("config.problem: missing");

  const json& p = j["problem"];
  check_keys(p, "problem",
             {"interval", "bc", "p", "q", "f", "g", "regularization", "singular"});
  if (p.contains("interval")) parse_interval(p["interval"], "problem.interval",
                                             cfg.problem);

  if (!p.contains("bc")) throw ConfigError("problem.bc: missing");
  const json& bc = p["bc"];
  check_keys(bc, "problem.bc",
             {"type", "alpha", "beta", "xi", "eta", "a1", "b1", "a2", "b2"});
  if (!bc.contains("type") || !bc["type"].is_string())
    throw ConfigError("problem.bc.type: missing boundary family");
  cfg.problem.bc.kind = bc_kind_from(bc["type"].get<std::string>(), "problem.bc.type");
  cfg.problem.bc.alpha = num_at(bc, "problem.bc", "alpha", 0.0);
  cfg.problem.bc.beta = num_at(bc, "problem.bc", "beta", 0.0);
  cfg.problem.bc.xi = num_at(bc, "problem.bc", "xi", 0.0);
  cfg.problem.bc.eta = num_at(bc, "problem.bc", "eta", 0.0);
  cfg.problem.bc.a1 = num_at(bc, "problem.bc", "a1", 1.0);
  cfg.problem.bc.b1 = num_at(bc, "problem.bc", "b1", 1.0);
  cfg.problem.bc.a2 = num_at(bc, "problem.bc", "a2", 1.0);
  cfg.problem.bc.b2 = num_at(bc, "problem.bc", "b2", 1.0);

  cfg.problem.p = expr_at(p, "problem", "p", false);
  cfg.problem.q = expr_at(p, "problem", "q", false);
  cfg.problem.f = expr_at(p, "problem", "f");
  cfg.problem.g = expr_at(p, "problem", "g");

  if (p.contains("regularization")) {
    if (!p["regularization"].is_string())
      throw ConfigError("problem.regularization: expected a string");
    cfg.problem.regularization =
        reg_from(p["regularization"].get<std::string>(), "problem.regularization");
  }
  if (p.contains("singular")) {
    const json& s = p["singular"];
    check_keys(s, "problem.singular", {"x", "y", "d", "endpoints"});
    cfg.problem.singular.x = s.value("x", false);
    cfg.problem.singular.y = s.value("y", false);
    cfg.problem.singular.d = s.value("d", false);
    cfg.problem.singular.endpoints = s.value("endpoints", false);
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver",
               {"N", "grading", "omega", "tol_fp", "max_iter", "n0", "n_growth",
                "n_max", "tol_reg", "m_max", "tol_tail"});
    cfg.solver.N = static_cast<int>(num_at(s, "solver", "N", 512));
    cfg.solver.grading = num_at(s, "solver", "grading", 4.0);
    cfg.solver.omega = num_at(s, "solver", "omega", 0.5);
    cfg.solver.tol_fp = num_at(s, "solver", "tol_fp", 1e-10);
    cfg.solver.max_iter = static_cast<int>(num_at(s, "solver", "max_iter", 10000));
    cfg.solver.n0 = static_cast<long>(num_at(s, "solver", "n0", 0));
    cfg.solver.n_growth = num_at(s, "solver", "n_growth", 2.0);
    cfg.solver.n_max =
        static_cast<long>(num_at(s, "solver", "n_max", double(1L << 26)));
    cfg.solver.tol_reg = num_at(s, "solver", "tol_reg", 1e-6);
    cfg.solver.m_max = num_at(s, "solver", "m_max", 64.0);
    cfg.solver.tol_tail = num_at(s, "solver", "tol_tail", 1e-4);
    cfg.halfline_schedule.m_max = cfg.solver.m_max;
    cfg.halfline_schedule.tol_tail = cfg.solver.tol_tail;
    cfg.halfline_schedule.tol_compact = cfg.solver.tol_compact;
    if (cfg.solver.omega <= 0.0 || cfg.solver.omega > 1.0)
      throw ConfigError("solver.omega: must lie in (0, 1]");
    if (cfg.solver.tol_fp <= 0.0) throw ConfigError("solver.tol_fp: must be positive");
  }

  if (j.contains("hypotheses")) {
    if (!j["hypotheses"].is_array())
      throw ConfigError("hypotheses: expected an array");
    for (const json& h : j["hypotheses"]) {
      HypothesisRequest req;
      if (h.is_string()) {
        req.label = h.get<std::string>();
        req.params = json::object();
      } else if (h.is_object() && h.contains("label") && h["label"].is_string()) {
        req.label = h["label"].get<std::string>();
        req.params = h;
        req.params.erase("label");
      } else {
        throw ConfigError("hypotheses[]: each entry is a label string or an object "
                          "with a label");
      }
      cfg.hypotheses.push_back(std::move(req));
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output_path = o["path"].get<std::string>();
    if (o.contains("format")) {
      cfg.output_format = o["format"].get<std::string>();
      if (cfg.output_format != "json" && cfg.output_format != "csv")
        throw ConfigError("output.format: must be json or csv");
    }
  }

  // invariants with the cited constraint surfaced
  try {
    cfg.problem.validate();
  } catch (const KernelError& e) {
    throw ConfigError(std::string("problem.bc: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file `" + path + "`");
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  return config_from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  json bc{{"type", BoundarySpec::kind_name(problem.bc.kind)},
          {"alpha", problem.bc.alpha},
          {"beta", problem.bc.beta},
          {"xi", problem.bc.xi},
          {"eta", problem.bc.eta},
          {"a1", problem.bc.a1},
          {"b1", problem.bc.b1},
          {"a2", problem.bc.a2},
          {"b2", problem.bc.b2}};
  const char* reg = "none";
  switch (problem.regularization) {
    case Regularization::None: reg = "none"; break;
    case Regularization::ShiftState: reg = "shift_state"; break;
    case Regularization::ShiftDerivative: reg = "shift_derivative"; break;
    case Regularization::RetractionBox: reg = "retraction_box"; break;
  }
  json interval = json::array();
  interval.push_back(problem.lo);
  if (std::isfinite(problem.hi))
    interval.push_back(problem.hi);
  else
    interval.push_back("inf");
  json p{{"interval", interval},
         {"bc", bc},
         {"f", problem.f.pretty()},
         {"g", problem.g.pretty()},
         {"regularization", reg},
         {"singular",
          {{"x", problem.singular.x},
           {"y", problem.singular.y},
           {"d", problem.singular.d},
           {"endpoints", problem.singular.endpoints}}}};
  if (!problem.p.empty()) p["p"] = problem.p.pretty();
  if (!problem.q.empty()) p["q"] = problem.q.pretty();

  json s{{"N", solver.N},
         {"grading", solver.grading},
         {"omega", solver.omega},
         {"tol_fp", solver.tol_fp},
         {"max_iter", solver.max_iter},
         {"n0", solver.n0},
         {"n_growth", solver.n_growth},
         {"n_max", solver.n_max},
         {"tol_reg", solver.tol_reg},
         {"m_max", solver.m_max},
         {"tol_tail", solver.tol_tail}};

  json hyp = json::array();
  for (const HypothesisRequest& h : hypotheses) {
    json e = h.params;
    e["label"] = h.label;
    hyp.push_back(e);
  }

  json out{{"path", output_path}, {"format", output_format}};
  return json{{"problem", p}, {"solver", s}, {"hypotheses", hyp}, {"output", out}};
}

}  // namespace sbvp
