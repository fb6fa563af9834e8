#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sbvp/expr.hpp"

using namespace sbvp;

TEST_CASE("single token") {
  Expr e = parse("t");
  CHECK(e.eval(Env::of_t(0.3)) == 0.3);
  CHECK(e.free_vars() == std::set<Var>{Var::T});
  CHECK(e.pretty() == "t");
}

TEST_CASE("first worked nonlinearity evaluates by hand substitution") {
  Expr e = parse("1/(t*(1-t))*(1/y + 3*y^(1/3))");
  Env env;
  env.t = 0.5;
  env.y = 1.0;
  // 1/(0.25) * (1 + 3) = 16
  CHECK(e.eval(env) == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("syntax error carries the byte offset") {
  try {
    parse("1/(t*(1-t)");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.offset() == 10);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("foo(t)"), ParseError);
  CHECK_THROWS_AS(parse("min(t)"), ParseError);
  CHECK_THROWS_AS(parse("sqrt(t, 1)"), ParseError);
  CHECK_THROWS_AS(parse("2 t"), ParseError);
}

TEST_CASE("domain errors are reported, not propagated") {
  Expr e = parse("1/y");
  Env env;
  env.t = 0.5;
  env.y = 0.0;
  CHECK_THROWS_AS(e.eval(env), EvalError);

  CHECK_THROWS_AS(parse("log(t)").eval(Env::of_t(0.0)), EvalError);
  CHECK_THROWS_AS(parse("t^(-0.5)").eval(Env::of_t(0.0)), EvalError);
  CHECK_THROWS_AS(parse("exp(t)").eval(Env::of_t(1e6)), EvalError);
  CHECK_THROWS_AS(parse("x").eval(Env::of_t(0.5)), EvalError);
}

TEST_CASE("free variables") {
  CHECK(parse("1/y + 3*y^(1/3)").free_vars() == std::set<Var>{Var::Y});
  CHECK(parse("x^0.25 * y^0.75 * d^(-0.5)").free_vars() ==
        std::set<Var>{Var::X, Var::Y, Var::D});
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("1+2*3").eval(Env{}) == 7.0);
  CHECK(parse("(1+2)*3").eval(Env{}) == 9.0);
  CHECK(parse("2^3^2").eval(Env{}) == 512.0);  // right-assoc
  CHECK(parse("-2^2").eval(Env{}) == -4.0);    // ^ binds above unary minus
  CHECK(parse("2^-1").eval(Env{}) == 0.5);
  CHECK(parse("8/4/2").eval(Env{}) == 1.0);
  CHECK(parse("8-4-2").eval(Env{}) == 2.0);
  CHECK(parse("pow(2, 10)").eval(Env{}) == 1024.0);
  CHECK(parse("min(3, max(1, 2))").eval(Env{}) == 2.0);
  CHECK(parse("cbrt(27)").eval(Env{}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("pretty round-trips structurally") {
  for (const char* src : {"t", "1+2*3", "(1+2)*3", "1/(t*(1-t))*(1/y + 3*y^(1/3))",
                          "x^0.25 * y^0.75 * d^(-0.5)", "-t^2", "2^3^2",
                          "min(x, 1)*exp(1/min(x, 1))", "t - (1 - t)", "8/4/2",
                          "-(t+1)", "abs(-t)"}) {
    Expr e = parse(src);
    Expr back = parse(e.pretty());
    CHECK_MESSAGE(back == e, "round-trip failed for ", src, " -> ", e.pretty());
  }
  CHECK(parse("1+2*3").pretty() == "1 + 2 * 3");
  CHECK(parse("(1+2)*3").pretty() == "(1 + 2) * 3");
}

namespace {

// Random AST generator for the round-trip property.
Expr random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_real_distribution<double> cval(-4.0, 4.0);
  std::uniform_int_distribution<int> vpick(0, 3);
  switch (pick(rng)) {
    case 0:
      return Expr::constant(std::round(cval(rng) * 16.0) / 16.0);
    case 1:
      return Expr::variable(static_cast<Var>(vpick(rng)));
    case 2:
      return Expr::unary_minus(random_expr(rng, depth - 1));
    case 3: {
      std::uniform_int_distribution<int> opick(0, 4);
      BinOp op = static_cast<BinOp>(opick(rng));
      return Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
    default: {
      std::uniform_int_distribution<int> fpick(0, 6);
      Func f = static_cast<Func>(fpick(rng));
      if (func_arity(f) == 2)
        return Expr::call(f, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
      return Expr::call(f, random_expr(rng, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("round-trip: 1000 random ASTs evaluate bit-for-bit after pretty/parse") {
  std::mt19937 rng(20240817);
  Env env;
  env.t = 0.37;
  env.x = 1.25;
  env.y = 0.8;
  env.d = 2.5;
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Expr e = random_expr(rng, 8);
    Expr back = parse(e.pretty());
    REQUIRE(back == e);
    double a, b;
    bool a_threw = false, b_threw = false;
    try {
      a = e.eval(env);
    } catch (const EvalError&) {
      a_threw = true;
      a = 0;
    }
    try {
      b = back.eval(env);
    } catch (const EvalError&) {
      b_threw = true;
      b = 0;
    }
    REQUIRE(a_threw == b_threw);
    if (!a_threw) {
      REQUIRE(a == b);  // bitwise
      ++checked;
    }
  }
  CHECK(checked > 200);  // most samples should evaluate cleanly
}

namespace {

// Independent shunting-yard evaluator over + - * / for the precedence oracle.
double shunting_yard(const std::string& s) {
  std::vector<double> vals;
  std::vector<char> ops;
  auto prec = [](char c) { return (c == '+' || c == '-') ? 1 : 2; };
  auto apply = [&]() {
    char op = ops.back();
    ops.pop_back();
    double b = vals.back();
    vals.pop_back();
    double a = vals.back();
    vals.pop_back();
    switch (op) {
      case '+': vals.push_back(a + b); break;
      case '-': vals.push_back(a - b); break;
      case '*': vals.push_back(a * b); break;
      case '/': vals.push_back(a / b); break;
    }
  };
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      double v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        v = v * 10 + (s[i++] - '0');
      vals.push_back(v);
      continue;
    }
    while (!ops.empty() && prec(ops.back()) >= prec(c)) apply();
    ops.push_back(c);
    ++i;
  }
  while (!ops.empty()) apply();
  return vals.back();
}

}  // namespace

TEST_CASE("precedence oracle: 1000 random flat expressions match shunting-yard") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(1, 9);
  std::uniform_int_distribution<int> num(1, 9);
  const char ops[4] = {'+', '-', '*', '/'};
  std::uniform_int_distribution<int> opick(0, 3);
  for (int rep = 0; rep < 1000; ++rep) {
    int k = len(rng);
    std::string src = std::to_string(num(rng));
    for (int j = 0; j < k; ++j) {
      src += ops[opick(rng)];
      src += std::to_string(num(rng));
    }
    double want = shunting_yard(src);
    double got = parse(src).eval(Env{});
    REQUIRE(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("substitution composes trees") {
  Expr f = parse("x^2 + y");
  Expr w = parse("t*(1-t)");
  Expr composed = f.substitute(Var::X, w).substitute(Var::Y, w);
  Env env = Env::of_t(0.5);
  CHECK(composed.eval(env) == doctest::Approx(0.25 * 0.25 + 0.25));
  CHECK(composed.free_vars() == std::set<Var>{Var::T});
}
