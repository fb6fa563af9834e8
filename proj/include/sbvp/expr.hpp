#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbvp {

/// Scalar expression language over the variables {t, x, y, d}.
///
/// Grammar (EBNF):
///   expr    = term { ("+" | "-") term } ;
///   term    = unary { ("*" | "/") unary } ;
///   unary   = "-" unary | power ;
///   power   = atom [ "^" unary ] ;            (* right-associative, binds above unary minus *)
///   atom    = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")" ;
///
/// Functions: exp, log, sqrt, abs, cbrt (arity 1), min, max, pow (arity 2).
/// No implicit multiplication.
enum class Var : std::uint8_t { T, X, Y, D };

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

enum class Func : std::uint8_t { Exp, Log, Sqrt, Abs, Cbrt, Min, Max };

const char* var_name(Var v);
const char* func_name(Func f);
int func_arity(Func f);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain failure during evaluation: unbound variable, log of a non-positive
/// value, 0 raised to a negative power, division by zero, or a non-finite
/// result. The message carries the offending subexpression.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variable bindings for eval(). Unset slots count as unbound.
struct Env {
  std::optional<double> t, x, y, d;

  static Env of_t(double tv) {
    Env e;
    e.t = tv;
    return e;
  }
  Env& set(Var v, double val);
  std::optional<double> get(Var v) const;
};

/// Immutable expression tree stored in a flat arena; value semantics, cheap
/// to copy, safe for unrestricted concurrent use after construction.
class Expr {
 public:
  Expr() = default;

  static Expr constant(double c);
  static Expr variable(Var v);
  static Expr unary_minus(const Expr& e);
  static Expr binary(BinOp op, const Expr& lhs, const Expr& rhs);
  static Expr call(Func f, const Expr& arg);
  static Expr call(Func f, const Expr& a, const Expr& b);

  bool empty() const { return nodes_.empty(); }

  double eval(const Env& env) const;
  std::set<Var> free_vars() const;
  std::string pretty() const;

  /// Structural substitution of every occurrence of `v` by `replacement`.
  Expr substitute(Var v, const Expr& replacement) const;

  bool operator==(const Expr& other) const;

 private:
  friend class ExprParser;

  enum class Kind : std::uint8_t { Constant, Variable, Neg, Binary, Call };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;   // Constant
    Var var = Var::T;     // Variable
    BinOp op = BinOp::Add;
    Func fn = Func::Exp;
    std::uint32_t a = 0, b = 0;  // child indices (b unused for unary)
  };

  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;

  static int prec_of(BinOp op);
  std::uint32_t add(Node n);
  std::uint32_t import(const Expr& other, std::uint32_t idx);
  double eval_node(std::uint32_t idx, const Env& env) const;
  void pretty_node(std::uint32_t idx, int parent_prec, bool force_parens,
                   std::string& out) const;
  std::string pretty_sub(std::uint32_t idx) const;
  std::uint32_t subst_node(std::uint32_t idx, Var v, const Expr& repl, Expr& out) const;
  bool eq_node(std::uint32_t a, const Expr& other, std::uint32_t b) const;
};

/// Parses `src` into an Expr. Throws ParseError with a byte offset on
/// malformed input, unknown identifiers, or wrong arity.
Expr parse(const std::string& src);

}  // namespace sbvp
