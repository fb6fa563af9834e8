#include "sbvp/harness.hpp"

namespace sbvp {

namespace {

using nlohmann::json;

RunConfig base_config() {
  RunConfig cfg;
  cfg.output_format = "json";
  return cfg;
}

void expect_all(ExampleRecord& rec, std::initializer_list<const char*> labels) {
  for (const char* l : labels) rec.expected_verdicts[l] = true;
}

json jexpr(std::initializer_list<std::pair<const char*, json>> kv) {
  json j = json::object();
  for (auto& [k, v] : kv) j[k] = v;
  return j;
}

void add_hyp(RunConfig& cfg, const char* label, json params) {
  cfg.hypotheses.push_back({label, std::move(params)});
}

// --- chapter 2: three-point truncated family -------------------------------

ExampleRecord ch2_ex1() {
  ExampleRecord rec;
  rec.id = "ch2_ex1_three_point";
  rec.anchor = "2.1, first worked pair";
  rec.description = "f = (1/y + 3 y^{1/3})/(t(1-t)), g = (1/x + 4x)/(t(1-t))";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  cfg.problem.bc.alpha = 2.0;
  cfg.problem.bc.eta = 1.0 / 3.0;
  cfg.problem.p = parse("1/(t*(1-t))");
  cfg.problem.q = parse("1/(t*(1-t))");
  cfg.problem.f = parse("1/y + 3*y^(1/3)");
  cfg.problem.g = parse("1/x + 4*x");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A1", jexpr({{"K", "1/(t*(1-t))"}, {"L", "1/(t*(1-t))"}}));
  add_hyp(cfg, "A2", jexpr({{"F", "1/x + 3*x^(1/3)"},
                            {"G", "1/x + 4*x"},
                            {"alpha1", 0.5},
                            {"alpha2", 2.0}}));
  add_hyp(cfg, "A3", jexpr({{"f", "(1/x + 3*x^(1/3))/(t*(1-t))"},
                            {"g", "(1/x + 4*x)/(t*(1-t))"},
                            {"beta1", 1.0},
                            {"beta2", 1.0},
                            {"eta", 1.0 / 3.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A1", "A2", "A3"});
  return rec;
}

ExampleRecord ch2_ex2() {
  ExampleRecord rec;
  rec.id = "ch2_ex2_three_point";
  rec.anchor = "2.1, second worked pair";
  rec.description = "f = e^{1/y}/(t(1-t)), g = e^{1/x}/(t(1-t))";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  cfg.problem.bc.alpha = 2.0;
  cfg.problem.bc.eta = 1.0 / 3.0;
  cfg.problem.p = parse("1/(t*(1-t))");
  cfg.problem.q = parse("1/(t*(1-t))");
  cfg.problem.f = parse("exp(1/y)");
  cfg.problem.g = parse("exp(1/x)");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A1", jexpr({{"K", "1/(t*(1-t))"}, {"L", "1/(t*(1-t))"}}));
  add_hyp(cfg, "A2", jexpr({{"F", "exp(1/x)"},
                            {"G", "exp(1/x)"},
                            {"alpha1", 1.0},
                            {"alpha2", 1.0}}));
  add_hyp(cfg, "A4", jexpr({{"f", "exp(1/x)/(t*(1-t))"}, {"G", "exp(1/x)"}, {"b", 1.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A1", "A2", "A4"});
  return rec;
}

ExampleRecord ch2_ex3() {
  ExampleRecord rec;
  rec.id = "ch2_ex3_three_point";
  rec.anchor = "2.1, third worked pair";
  rec.description = "capped state nonlinearity y e^{1/y} / e, weight 1/(t(1-t))";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  cfg.problem.bc.alpha = 2.0;
  cfg.problem.bc.eta = 1.0 / 3.0;
  cfg.problem.p = parse("1/(t*(1-t))");
  cfg.problem.q = parse("1/(t*(1-t))");
  cfg.problem.f = parse("min(y, 1)*exp(1/min(y, 1))");
  cfg.problem.g = parse("min(x, 1)*exp(1/min(x, 1))");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A1", jexpr({{"K", "1/(t*(1-t))"}, {"L", "1/(t*(1-t))"}}));
  add_hyp(cfg, "A3", jexpr({{"f", "min(x, 1)*exp(1/min(x, 1))/(t*(1-t))"},
                            {"g", "min(x, 1)*exp(1/min(x, 1))/(t*(1-t))"},
                            {"beta1", 1.0},
                            {"beta2", 1.0},
                            {"eta", 1.0 / 3.0}}));
  add_hyp(cfg, "A5", jexpr({{"F", "min(x, 1)*exp(1/min(x, 1))"},
                            {"g", "min(x, 1)*exp(1/min(x, 1))/(t*(1-t))"},
                            {"a", 1.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A1", "A3", "A5"});
  return rec;
}

ExampleRecord ch2_ex4() {
  ExampleRecord rec;
  rec.id = "ch2_ex4_three_point";
  rec.anchor = "2.1, fourth worked pair";
  rec.description = "f = 1/sqrt(y) / (t(1-t)), g = 1/x^2 / (t(1-t))";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::ThreePointTruncated;
  cfg.problem.bc.alpha = 2.0;
  cfg.problem.bc.eta = 1.0 / 3.0;
  cfg.problem.p = parse("1/(t*(1-t))");
  cfg.problem.q = parse("1/(t*(1-t))");
  cfg.problem.f = parse("1/sqrt(y)");
  cfg.problem.g = parse("1/x^2");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A1", jexpr({{"K", "1/(t*(1-t))"}, {"L", "1/(t*(1-t))"}}));
  add_hyp(cfg, "A4",
          jexpr({{"f", "1/(sqrt(x)*t*(1-t))"}, {"G", "1/x^2"}, {"b", 1.0}}));
  add_hyp(cfg, "A5",
          jexpr({{"F", "1/sqrt(x)"}, {"g", "1/(x^2*t*(1-t))"}, {"a", 1.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A1", "A4", "A5"});
  return rec;
}

// --- chapter 2: full-interval family ---------------------------------------

ExampleRecord ch2_ex5() {
  ExampleRecord rec;
  rec.id = "ch2_ex5_general";
  rec.anchor = "2.2, worked pair";
  rec.description = "f = g = (t(1-t) x y)^{-1/4} under the three-point conditions";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::ThreePoint;
  cfg.problem.bc.alpha = 2.0;
  cfg.problem.bc.eta = 1.0 / 3.0;
  cfg.problem.f = parse("(t*(1-t)*x*y)^(-0.25)");
  cfg.problem.g = parse("(t*(1-t)*x*y)^(-0.25)");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A6", jexpr({{"f", "(t*(1-t)*x*y)^(-0.25)"},
                            {"g", "(t*(1-t)*x*y)^(-0.25)"}}));
  add_hyp(cfg, "A7", jexpr({{"f", "(t*(1-t)*x*y)^(-0.25)"},
                            {"alpha1", -0.25},
                            {"beta1", 0.0},
                            {"alpha2", -0.25},
                            {"beta2", 0.0}}));
  add_hyp(cfg, "A8", jexpr({{"g", "(t*(1-t)*x*y)^(-0.25)"},
                            {"gamma1", -0.25},
                            {"rho1", 0.0},
                            {"gamma2", -0.25},
                            {"rho2", 0.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A6", "A7", "A8"});
  return rec;
}

// --- chapter 2: four-point coupled family ----------------------------------

ExampleRecord ch2_ex6() {
  ExampleRecord rec;
  rec.id = "ch2_ex6_four_point";
  rec.anchor = "2.3, statement-only instance (regular scaling family)";
  rec.description =
      "f = g = (x^{1/4} + y^{1/4} + 1)/sqrt(t(1-t)) with coupled four-point data";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::FourPointCoupled;
  cfg.problem.bc.alpha = 1.0;
  cfg.problem.bc.beta = 1.0;
  cfg.problem.bc.xi = 0.5;
  cfg.problem.bc.eta = 0.5;
  cfg.problem.p = parse("1/sqrt(t*(1-t))");
  cfg.problem.q = parse("1/sqrt(t*(1-t))");
  cfg.problem.f = parse("x^(1/4) + y^(1/4) + 1");
  cfg.problem.g = parse("x^(1/4) + y^(1/4) + 1");
  cfg.problem.regularization = Regularization::None;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A9",
          jexpr({{"f", "(x^(1/4) + y^(1/4) + 1)/sqrt(t*(1-t))"},
                 {"g", "(x^(1/4) + y^(1/4) + 1)/sqrt(t*(1-t))"}}));
  add_hyp(cfg, "A10", jexpr({{"f", "(x^(1/4) + y^(1/4) + 1)/sqrt(t*(1-t))"},
                             {"alpha1", 0.0},
                             {"beta1", 0.25},
                             {"alpha2", 0.0},
                             {"beta2", 0.25}}));
  add_hyp(cfg, "A11", jexpr({{"g", "(x^(1/4) + y^(1/4) + 1)/sqrt(t*(1-t))"},
                             {"gamma1", 0.0},
                             {"rho1", 0.25},
                             {"gamma2", 0.0},
                             {"rho2", 0.25}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A9", "A10", "A11"});
  return rec;
}

ExampleRecord ch2_ex7() {
  ExampleRecord rec;
  rec.id = "ch2_ex7_four_point_singular";
  rec.anchor = "2.3, statement-only instance (state-singular family)";
  rec.description = "f = g = (t(1-t) x y)^{-1/4} with coupled four-point data";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::FourPointCoupled;
  cfg.problem.bc.alpha = 0.5;
  cfg.problem.bc.beta = 3.0;
  cfg.problem.bc.xi = 0.25;
  cfg.problem.bc.eta = 0.5;
  cfg.problem.f = parse("(t*(1-t)*x*y)^(-0.25)");
  cfg.problem.g = parse("(t*(1-t)*x*y)^(-0.25)");
  cfg.problem.regularization = Regularization::ShiftState;
  cfg.problem.singular.x = cfg.problem.singular.y = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "A6", jexpr({{"f", "(t*(1-t)*x*y)^(-0.25)"},
                            {"g", "(t*(1-t)*x*y)^(-0.25)"}}));
  add_hyp(cfg, "A7", jexpr({{"f", "(t*(1-t)*x*y)^(-0.25)"},
                            {"alpha1", -0.25},
                            {"beta1", 0.0},
                            {"alpha2", -0.25},
                            {"beta2", 0.0}}));
  add_hyp(cfg, "A8", jexpr({{"g", "(t*(1-t)*x*y)^(-0.25)"},
                            {"gamma1", -0.25},
                            {"rho1", 0.0},
                            {"gamma2", -0.25},
                            {"rho2", 0.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"A6", "A7", "A8"});
  return rec;
}

// --- chapter 3 --------------------------------------------------------------

ExampleRecord ch3_ex_3_1_26() {
  ExampleRecord rec;
  rec.id = "ch3_ex_3_1_26";
  rec.anchor = "3.1, worked pair";
  rec.description =
      "p = t^{-1/3}(1-t)^{-2/3}, q mirrored; f = y^{1/3} d^{-1/2}, g = x^{2/3} d^{-1/4}";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::DirichletNeumann;
  cfg.problem.p = parse("t^(-1/3)*(1-t)^(-2/3)");
  cfg.problem.q = parse("t^(-2/3)*(1-t)^(-1/3)");
  cfg.problem.f = parse("y^(1/3)*d^(-0.5)");
  cfg.problem.g = parse("x^(2/3)*d^(-0.25)");
  cfg.problem.regularization = Regularization::RetractionBox;
  cfg.problem.singular.d = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "B1", jexpr({{"p", "t^(-1/3)*(1-t)^(-2/3)"},
                            {"q", "t^(-2/3)*(1-t)^(-1/3)"}}));
  add_hyp(cfg, "B2", jexpr({{"f", "y^(1/3)*d^(-0.5)"}, {"g", "x^(2/3)*d^(-0.25)"}}));
  add_hyp(cfg, "B3", jexpr({{"f", "y^(1/3)*d^(-0.5)"},
                            {"g", "x^(2/3)*d^(-0.25)"},
                            {"k1", "x^(1/3)"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "0"},
                            {"k2", "x^(2/3)"},
                            {"u2", "x^(-0.25)"},
                            {"v2", "0"}}));
  add_hyp(cfg, "B4", jexpr({{"k1", "x^(1/3)"},
                            {"k2", "x^(2/3)"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "0"},
                            {"u2", "x^(-0.25)"},
                            {"v2", "0"}}));
  add_hyp(cfg, "B5",
          jexpr({{"u1", "x^(-0.5)"}, {"v1", "0"}, {"u2", "x^(-0.25)"}, {"v2", "0"}}));
  add_hyp(cfg, "B6", jexpr({{"f", "y^(1/3)*d^(-0.5)"},
                            {"g", "x^(2/3)*d^(-0.25)"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 1.0 / 3.0},
                            {"delta2", 2.0 / 3.0},
                            {"E", 1.0},
                            {"F", 1.0}}));
  add_hyp(cfg, "B7", jexpr({{"p", "t^(-1/3)*(1-t)^(-2/3)"},
                            {"q", "t^(-2/3)*(1-t)^(-1/3)"},
                            {"u1", "x^(-0.5)"},
                            {"u2", "x^(-0.25)"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 1.0 / 3.0},
                            {"delta2", 2.0 / 3.0}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"B1", "B2", "B3", "B4", "B5", "B6", "B7"});
  return rec;
}

ExampleRecord ch3_ex_3_2_39() {
  ExampleRecord rec;
  rec.id = "ch3_ex_3_2_39";
  rec.anchor = "3.2, worked pair";
  rec.description =
      "constant small weights, k = 1 + x^{1/2} + x^2, u = d^{-1/2}, v = 1 + d^{1/2}";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::DirichletNeumann;
  cfg.problem.p = parse("0.025");
  cfg.problem.q = parse("0.025");
  cfg.problem.f = parse("(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))");
  cfg.problem.g = parse("(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))");
  cfg.problem.regularization = Regularization::ShiftDerivative;
  cfg.problem.singular.d = true;
  add_hyp(cfg, "B1", jexpr({{"p", "0.025"}, {"q", "0.025"}}));
  add_hyp(cfg, "B2", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"}}));
  add_hyp(cfg, "B3", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"k1", "1 + x^0.5 + x^2"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "1 + x^0.5"},
                            {"k2", "1 + x^0.5 + x^2"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B4", jexpr({{"k1", "1 + x^0.5 + x^2"},
                            {"k2", "1 + x^0.5 + x^2"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "1 + x^0.5"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B5", jexpr({{"u1", "x^(-0.5)"},
                            {"v1", "1 + x^0.5"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B8", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 0.5},
                            {"delta2", 0.5},
                            {"E", 1.0}}));
  add_hyp(cfg, "B9", jexpr({{"p", "0.025"},
                            {"q", "0.025"},
                            {"v1", "1 + x^0.5"},
                            {"v2", "1 + x^0.5"},
                            {"u1", "x^(-0.5)"},
                            {"u2", "x^(-0.5)"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 0.5},
                            {"delta2", 0.5}}));
  add_hyp(cfg, "B10", jexpr({{"h1", "1 + x^2"}, {"h2", "1 + x^2"}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"B1", "B2", "B3", "B4", "B5", "B8", "B9", "B10"});
  return rec;
}

ExampleRecord ch3_ex_3_3_26() {
  ExampleRecord rec;
  rec.id = "ch3_ex_3_3_26";
  rec.anchor = "3.3, worked pair";
  rec.description =
      "p = (1-t)^{-3/4}, q = (1-t)^{-1/4}; f = y^{1/4} d^{-1/2}, g = x^{3/4} d^{-1/2}";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::RobinNeumann;
  cfg.problem.bc.a1 = cfg.problem.bc.b1 = 1.0;
  cfg.problem.bc.a2 = cfg.problem.bc.b2 = 1.0;
  cfg.problem.p = parse("(1-t)^(-0.75)");
  cfg.problem.q = parse("(1-t)^(-0.25)");
  cfg.problem.f = parse("y^(1/4)*d^(-0.5)");
  cfg.problem.g = parse("x^(3/4)*d^(-0.5)");
  cfg.problem.regularization = Regularization::RetractionBox;
  cfg.problem.singular.d = true;
  cfg.problem.singular.endpoints = true;
  add_hyp(cfg, "B1", jexpr({{"p", "(1-t)^(-0.75)"}, {"q", "(1-t)^(-0.25)"}}));
  add_hyp(cfg, "B2", jexpr({{"f", "y^(1/4)*d^(-0.5)"}, {"g", "x^(3/4)*d^(-0.5)"}}));
  add_hyp(cfg, "B3", jexpr({{"f", "y^(1/4)*d^(-0.5)"},
                            {"g", "x^(3/4)*d^(-0.5)"},
                            {"k1", "x^(1/4)"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "0"},
                            {"k2", "x^(3/4)"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "0"}}));
  add_hyp(cfg, "B5",
          jexpr({{"u1", "x^(-0.5)"}, {"v1", "0"}, {"u2", "x^(-0.5)"}, {"v2", "0"}}));
  add_hyp(cfg, "B6", jexpr({{"f", "y^(1/4)*d^(-0.5)"},
                            {"g", "x^(3/4)*d^(-0.5)"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 0.25},
                            {"delta2", 0.75},
                            {"E", 1.0},
                            {"F", 1.0}}));
  add_hyp(cfg, "B11", jexpr({{"k1", "x^(1/4)"},
                             {"k2", "x^(3/4)"},
                             {"u1", "x^(-0.5)"},
                             {"v1", "0"},
                             {"u2", "x^(-0.5)"},
                             {"v2", "0"}}));
  add_hyp(cfg, "B12", jexpr({{"p", "(1-t)^(-0.75)"},
                             {"q", "(1-t)^(-0.25)"},
                             {"u1", "x^(-0.5)"},
                             {"u2", "x^(-0.5)"},
                             {"phi", "1"},
                             {"psi", "1"}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"B1", "B2", "B3", "B5", "B6", "B11", "B12"});
  return rec;
}

ExampleRecord ch3_ex_3_4_43() {
  ExampleRecord rec;
  rec.id = "ch3_ex_3_4_43";
  rec.anchor = "3.4, worked pair";
  rec.description = "the 3.2 pair under Robin conditions a = b = 1";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::RobinNeumann;
  cfg.problem.bc.a1 = cfg.problem.bc.b1 = 1.0;
  cfg.problem.bc.a2 = cfg.problem.bc.b2 = 1.0;
  cfg.problem.p = parse("0.025");
  cfg.problem.q = parse("0.025");
  cfg.problem.f = parse("(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))");
  cfg.problem.g = parse("(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))");
  cfg.problem.regularization = Regularization::ShiftDerivative;
  cfg.problem.singular.d = true;
  add_hyp(cfg, "B1", jexpr({{"p", "0.025"}, {"q", "0.025"}}));
  add_hyp(cfg, "B2", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"}}));
  add_hyp(cfg, "B3", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"k1", "1 + x^0.5 + x^2"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "1 + x^0.5"},
                            {"k2", "1 + x^0.5 + x^2"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B5", jexpr({{"u1", "x^(-0.5)"},
                            {"v1", "1 + x^0.5"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B8", jexpr({{"f", "(1 + y^0.5 + y^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"g", "(1 + x^0.5 + x^2)*(1 + d^0.5 + d^(-0.5))"},
                            {"phi", "1"},
                            {"psi", "1"},
                            {"delta1", 0.5},
                            {"delta2", 0.5},
                            {"E", 1.0}}));
  add_hyp(cfg, "B10", jexpr({{"h1", "1 + x^2"}, {"h2", "1 + x^2"}}));
  add_hyp(cfg, "B11", jexpr({{"k1", "1 + x^0.5 + x^2"},
                             {"k2", "1 + x^0.5 + x^2"},
                             {"u1", "x^(-0.5)"},
                             {"v1", "1 + x^0.5"},
                             {"u2", "x^(-0.5)"},
                             {"v2", "1 + x^0.5"}}));
  add_hyp(cfg, "B13", jexpr({{"p", "0.025"},
                             {"q", "0.025"},
                             {"u1", "x^(-0.5)"},
                             {"u2", "x^(-0.5)"},
                             {"phi", "1"},
                             {"psi", "1"}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"B1", "B2", "B3", "B5", "B8", "B10", "B11", "B13"});
  return rec;
}

ExampleRecord ch3_ex_4_2_21() {
  ExampleRecord rec;
  rec.id = "ch3_ex_4_2_21";
  rec.anchor = "3.5, worked pair";
  rec.description =
      "coupled two-point conditions; f = g = nu^{3/2} x^{1/4} y^{1/4} d^{-1/2}, nu = 1/4";
  RunConfig cfg = base_config();
  cfg.problem.bc.kind = BoundarySpec::Kind::TwoPointCoupledRobin;
  cfg.problem.bc.a1 = cfg.problem.bc.b1 = 1.0;
  cfg.problem.bc.a2 = cfg.problem.bc.b2 = 1.0;
  cfg.problem.f = parse("0.125*x^0.25*y^0.25*d^(-0.5)");
  cfg.problem.g = parse("0.125*x^0.25*y^0.25*d^(-0.5)");
  cfg.problem.regularization = Regularization::RetractionBox;
  cfg.problem.singular.d = true;
  add_hyp(cfg, "B1", jexpr({{"p", "1"}, {"q", "1"}}));
  add_hyp(cfg, "B2", jexpr({{"f", "0.125*x^0.25*y^0.25*d^(-0.5)"},
                            {"g", "0.125*x^0.25*y^0.25*d^(-0.5)"}}));
  add_hyp(cfg, "B3", jexpr({{"f", "0.125*x^0.25*y^0.25*d^(-0.5)"},
                            {"g", "0.125*x^0.25*y^0.25*d^(-0.5)"},
                            {"h1", "0.125*x^0.25"},
                            {"k1", "x^0.25"},
                            {"u1", "x^(-0.5)"},
                            {"v1", "0"},
                            {"h2", "0.125*x^0.25"},
                            {"k2", "x^0.25"},
                            {"u2", "x^(-0.5)"},
                            {"v2", "0"}}));
  add_hyp(cfg, "B5",
          jexpr({{"u1", "x^(-0.5)"}, {"v1", "0"}, {"u2", "x^(-0.5)"}, {"v2", "0"}}));
  add_hyp(cfg, "B14", jexpr({{"h1", "0.125*x^0.25"},
                             {"k1", "x^0.25"},
                             {"h2", "0.125*x^0.25"},
                             {"k2", "x^0.25"},
                             {"u1", "x^(-0.5)"},
                             {"v1", "0"},
                             {"u2", "x^(-0.5)"},
                             {"v2", "0"}}));
  add_hyp(cfg, "B16", jexpr({{"f", "0.125*x^0.25*y^0.25*d^(-0.5)"},
                             {"g", "0.125*x^0.25*y^0.25*d^(-0.5)"},
                             {"phi", "0.125"},
                             {"psi", "0.125"},
                             {"gamma1", 0.25},
                             {"delta1", 0.25},
                             {"gamma2", 0.25},
                             {"delta2", 0.25},
                             {"M", 1.0},
                             {"L", 1.0}}));
  add_hyp(cfg, "B17", jexpr({{"p", "1"},
                             {"q", "1"},
                             {"u1", "x^(-0.5)"},
                             {"u2", "x^(-0.5)"},
                             {"phi", "0.125"},
                             {"psi", "0.125"},
                             {"delta1", 0.25},
                             {"delta2", 0.25}}));
  rec.config = std::move(cfg);
  expect_all(rec, {"B1", "B2", "B3", "B5", "B14", "B16", "B17"});
  return rec;
}

// --- chapter 5 ---------------------------------------------------------------

RunConfig halfline_config(bool robin) {
  RunConfig cfg = base_config();
  cfg.problem.lo = 0.0;
  cfg.problem.hi = std::numeric_limits<double>::infinity();
  cfg.problem.halfline = true;
  cfg.problem.bc.kind = robin ? BoundarySpec::Kind::HalfLineRobin
                              : BoundarySpec::Kind::HalfLineDirichlet;
  cfg.problem.bc.a1 = cfg.problem.bc.b1 = 1.0;
  cfg.problem.bc.a2 = cfg.problem.bc.b2 = 1.0;
  cfg.problem.p = parse("exp(-t)");
  cfg.problem.q = parse("exp(-t)");
  // nu = 0.02, alpha_i = 1, gamma_i = delta_i = 1/4, M = 1
  cfg.problem.f = parse("0.0004*(2-x)*(2-y)*abs(x)^0.25*abs(y)^0.25*abs(d)^(-1)");
  cfg.problem.g = parse("0.0004*(2-x)*(2-y)*abs(x)^0.25*abs(y)^0.25*abs(d)^(-1)");
  cfg.problem.regularization = Regularization::RetractionBox;
  cfg.problem.cap_state = 1.0;  // M from the omega condition
  cfg.problem.cap_deriv = 1.0;
  cfg.problem.singular.d = true;

  const char* fsrc = "0.0004*(2-x)*(2-y)*abs(x)^0.25*abs(y)^0.25*abs(d)^(-1)";
  add_hyp(cfg, "C1", jexpr({{"p1", "exp(-t)"}, {"p2", "exp(-t)"}, {"decay", 1.0}}));
  add_hyp(cfg, "C2", jexpr({{"f1", fsrc}, {"f2", fsrc}}));
  add_hyp(cfg, "C3", jexpr({{"f1", fsrc},
                            {"f2", fsrc},
                            {"h1", "0.0004*(2+x)*x^0.25"},
                            {"k1", "(2+x)*x^0.25"},
                            {"u1", "x^(-1)"},
                            {"v1", "0"},
                            {"h2", "0.0004*(2+x)*x^0.25"},
                            {"k2", "(2+x)*x^0.25"},
                            {"u2", "x^(-1)"},
                            {"v2", "0"}}));
  json omega = jexpr({{"M", 1.0},
                      {"eps", 1e-4},
                      {"h1", "0.0004*(2+x)*x^0.25"},
                      {"k1", "(2+x)*x^0.25"},
                      {"u1", "x^(-1)"},
                      {"v1", "0"},
                      {"p1", "exp(-t)"},
                      {"h2", "0.0004*(2+x)*x^0.25"},
                      {"k2", "(2+x)*x^0.25"},
                      {"u2", "x^(-1)"},
                      {"v2", "0"},
                      {"p2", "exp(-t)"},
                      {"decay", 1.0}});
  add_hyp(cfg, robin ? "C8" : "C4", omega);
  add_hyp(cfg, "C5",
          jexpr({{"u1", "x^(-1)"}, {"v1", "0"}, {"u2", "x^(-1)"}, {"v2", "0"}}));
  add_hyp(cfg, "C6", jexpr({{"f1", fsrc}, {"f2", fsrc}, {"M", 1.0}}));
  add_hyp(cfg, "C7", jexpr({{"f1", fsrc},
                            {"f2", fsrc},
                            {"phi", "0.0004*exp(-t)"},
                            {"psi", "0.0004*exp(-t)"},
                            {"gamma1", 0.25},
                            {"delta1", 0.25},
                            {"gamma2", 0.25},
                            {"delta2", 0.25},
                            {"M", 1.0}}));
  return cfg;
}

ExampleRecord ch5_ex_tht1() {
  ExampleRecord rec;
  rec.id = "ch5_ex_half_line";
  rec.anchor = "5.1, worked pair";
  rec.description = "exponential weights, power nonlinearities, Dirichlet left end";
  rec.config = halfline_config(false);
  expect_all(rec, {"C1", "C2", "C3", "C4", "C5", "C6", "C7"});
  return rec;
}

ExampleRecord ch5_ex_ths1() {
  ExampleRecord rec;
  rec.id = "ch5_ex_half_line_robin";
  rec.anchor = "5.2, worked pair";
  rec.description = "the 5.1 pair under Robin left conditions a = b = 1";
  rec.config = halfline_config(true);
  expect_all(rec, {"C1", "C2", "C3", "C5", "C6", "C7", "C8"});
  return rec;
}

}  // namespace

const std::vector<ExampleRecord>& registry() {
  static const std::vector<ExampleRecord> recs = [] {
    std::vector<ExampleRecord> v;
    v.push_back(ch2_ex1());
    v.push_back(ch2_ex2());
    v.push_back(ch2_ex3());
    v.push_back(ch2_ex4());
    v.push_back(ch2_ex5());
    v.push_back(ch2_ex6());
    v.push_back(ch2_ex7());
    v.push_back(ch3_ex_3_1_26());
    v.push_back(ch3_ex_3_2_39());
    v.push_back(ch3_ex_3_3_26());
    v.push_back(ch3_ex_3_4_43());
    v.push_back(ch3_ex_4_2_21());
    v.push_back(ch5_ex_tht1());
    v.push_back(ch5_ex_ths1());
    return v;
  }();
  return recs;
}

const ExampleRecord& registry_get(const std::string& id) {
  for (const ExampleRecord& rec : registry())
    if (rec.id == id) return rec;
  throw ConfigError("unknown example id `" + id + "`");
}

}  // namespace sbvp
