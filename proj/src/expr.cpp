#include "sbvp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sbvp {

const char* var_name(Var v) {
  switch (v) {
    case Var::T: return "t";
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::D: return "d";
  }
  return "?";
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Cbrt: return "cbrt";
    case Func::Min: return "min";
    case Func::Max: return "max";
  }
  return "?";
}

int func_arity(Func f) {
  return (f == Func::Min || f == Func::Max) ? 2 : 1;
}

Env& Env::set(Var v, double val) {
  switch (v) {
    case Var::T: t = val; break;
    case Var::X: x = val; break;
    case Var::Y: y = val; break;
    case Var::D: d = val; break;
  }
  return *this;
}

std::optional<double> Env::get(Var v) const {
  switch (v) {
    case Var::T: return t;
    case Var::X: return x;
    case Var::Y: return y;
    case Var::D: return d;
  }
  return {};
}

int Expr::prec_of(BinOp op) {
  switch (op) {
    case BinOp::Add:
    case BinOp::Sub: return 1;
    case BinOp::Mul:
    case BinOp::Div: return 2;
    case BinOp::Pow: return 4;
  }
  return 0;
}

std::uint32_t Expr::add(Node n) {
  nodes_.push_back(n);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t Expr::import(const Expr& other, std::uint32_t idx) {
  const Node& n = other.nodes_[idx];
  Node copy = n;
  switch (n.kind) {
    case Kind::Constant:
    case Kind::Variable:
      break;
    case Kind::Neg:
      copy.a = import(other, n.a);
      break;
    case Kind::Binary:
      copy.a = import(other, n.a);
      copy.b = import(other, n.b);
      break;
    case Kind::Call:
      copy.a = import(other, n.a);
      if (func_arity(n.fn) == 2) copy.b = import(other, n.b);
      break;
  }
  return add(copy);
}

Expr Expr::constant(double c) {
  Expr e;
  Node n;
  n.kind = Kind::Constant;
  n.value = c;
  e.root_ = e.add(n);
  return e;
}

Expr Expr::variable(Var v) {
  Expr e;
  Node n;
  n.kind = Kind::Variable;
  n.var = v;
  e.root_ = e.add(n);
  return e;
}

Expr Expr::unary_minus(const Expr& child) {
  // canonical form: negation of a literal is a negative literal
  if (child.nodes_[child.root_].kind == Kind::Constant)
    return constant(-child.nodes_[child.root_].value);
  Expr e;
  std::uint32_t c = e.import(child, child.root_);
  Node n;
  n.kind = Kind::Neg;
  n.a = c;
  e.root_ = e.add(n);
  return e;
}

Expr Expr::binary(BinOp op, const Expr& lhs, const Expr& rhs) {
  Expr e;
  std::uint32_t a = e.import(lhs, lhs.root_);
  std::uint32_t b = e.import(rhs, rhs.root_);
  Node n;
  n.kind = Kind::Binary;
  n.op = op;
  n.a = a;
  n.b = b;
  e.root_ = e.add(n);
  return e;
}

Expr Expr::call(Func f, const Expr& arg) {
  Expr e;
  std::uint32_t a = e.import(arg, arg.root_);
  Node n;
  n.kind = Kind::Call;
  n.fn = f;
  n.a = a;
  e.root_ = e.add(n);
  return e;
}

Expr Expr::call(Func f, const Expr& a0, const Expr& b0) {
  Expr e;
  std::uint32_t a = e.import(a0, a0.root_);
  std::uint32_t b = e.import(b0, b0.root_);
  Node n;
  n.kind = Kind::Call;
  n.fn = f;
  n.a = a;
  n.b = b;
  e.root_ = e.add(n);
  return e;
}

namespace {
bool is_integral(double v) { return std::isfinite(v) && std::nearbyint(v) == v; }
}  // namespace

double Expr::eval_node(std::uint32_t idx, const Env& env) const {
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable: {
      auto v = env.get(n.var);
      if (!v) throw EvalError(std::string("unbound variable `") + var_name(n.var) + "`");
      return *v;
    }
    case Kind::Neg:
      return -eval_node(n.a, env);
    case Kind::Binary: {
      double a = eval_node(n.a, env);
      double b = eval_node(n.b, env);
      double r = 0;
      switch (n.op) {
        case BinOp::Add: r = a + b; break;
        case BinOp::Sub: r = a - b; break;
        case BinOp::Mul: r = a * b; break;
        case BinOp::Div:
          if (b == 0.0) throw EvalError("division by zero in `" + pretty_sub(idx) + "`");
          r = a / b;
          break;
        case BinOp::Pow:
          if (a == 0.0 && b < 0.0)
            throw EvalError("zero raised to a negative power in `" + pretty_sub(idx) + "`");
          if (a < 0.0 && !is_integral(b))
            throw EvalError("negative base with non-integer exponent in `" +
                            pretty_sub(idx) + "`");
          r = std::pow(a, b);
          break;
      }
      if (!std::isfinite(r)) throw EvalError("non-finite result in `" + pretty_sub(idx) + "`");
      return r;
    }
    case Kind::Call: {
      double a = eval_node(n.a, env);
      double r = 0;
      switch (n.fn) {
        case Func::Exp: r = std::exp(a); break;
        case Func::Log:
          if (a <= 0.0)
            throw EvalError("log of a non-positive value in `" + pretty_sub(idx) + "`");
          r = std::log(a);
          break;
        case Func::Sqrt:
          if (a < 0.0)
            throw EvalError("sqrt of a negative value in `" + pretty_sub(idx) + "`");
          r = std::sqrt(a);
          break;
        case Func::Abs: r = std::fabs(a); break;
        case Func::Cbrt: r = std::cbrt(a); break;
        case Func::Min: r = std::fmin(a, eval_node(n.b, env)); break;
        case Func::Max: r = std::fmax(a, eval_node(n.b, env)); break;
      }
      if (!std::isfinite(r)) throw EvalError("non-finite result in `" + pretty_sub(idx) + "`");
      return r;
    }
  }
  throw EvalError("corrupt expression");
}

double Expr::eval(const Env& env) const {
  if (nodes_.empty()) throw EvalError("empty expression");
  return eval_node(root_, env);
}

std::set<Var> Expr::free_vars() const {
  std::set<Var> out;
  for (const Node& n : nodes_)
    if (n.kind == Kind::Variable) out.insert(n.var);
  return out;
}

// Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power,
// 5 "must be an atom" (left operand of ^).
void Expr::pretty_node(std::uint32_t idx, int parent_prec, bool force_parens,
                       std::string& out) const {
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::Constant: {
      char buf[64];
      if (n.value == static_cast<double>(static_cast<long long>(n.value)) &&
          std::fabs(n.value) < 1e15)
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(n.value));
      else
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
      bool parens = n.value < 0 && parent_prec > 1;
      if (parens) out += '(';
      out += buf;
      if (parens) out += ')';
      return;
    }
    case Kind::Variable:
      out += var_name(n.var);
      return;
    case Kind::Neg: {
      bool parens = parent_prec > 3 || force_parens;
      if (parens) out += '(';
      out += '-';
      pretty_node(n.a, 3, false, out);
      if (parens) out += ')';
      return;
    }
    case Kind::Binary: {
      int prec = prec_of(n.op);
      const char* sym = nullptr;
      switch (n.op) {
        case BinOp::Add: sym = " + "; break;
        case BinOp::Sub: sym = " - "; break;
        case BinOp::Mul: sym = " * "; break;
        case BinOp::Div: sym = " / "; break;
        case BinOp::Pow: sym = "^"; break;
      }
      bool parens = prec < parent_prec || force_parens;
      if (parens) out += '(';
      if (n.op == BinOp::Pow) {
        pretty_node(n.a, 5, false, out);
        out += sym;
        pretty_node(n.b, 3, false, out);
      } else {
        pretty_node(n.a, prec, false, out);
        out += sym;
        // + - * / parse left-associative, so a same-precedence binary on the
        // right needs parentheses to reparse into the same tree
        bool rhs_force = nodes_[n.b].kind == Kind::Binary &&
                         prec_of(nodes_[n.b].op) == prec;
        pretty_node(n.b, prec, rhs_force, out);
      }
      if (parens) out += ')';
      return;
    }
    case Kind::Call:
      out += func_name(n.fn);
      out += '(';
      pretty_node(n.a, 0, false, out);
      if (func_arity(n.fn) == 2) {
        out += ", ";
        pretty_node(n.b, 0, false, out);
      }
      out += ')';
      return;
  }
}

std::string Expr::pretty() const {
  std::string out;
  if (!nodes_.empty()) pretty_node(root_, 0, false, out);
  return out;
}

std::string Expr::pretty_sub(std::uint32_t idx) const {
  std::string out;
  pretty_node(idx, 0, false, out);
  return out;
}

std::uint32_t Expr::subst_node(std::uint32_t idx, Var v, const Expr& repl,
                               Expr& out) const {
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::Constant:
      return out.add(n);
    case Kind::Variable:
      if (n.var == v) return out.import(repl, repl.root_);
      return out.add(n);
    case Kind::Neg: {
      Node m = n;
      m.a = subst_node(n.a, v, repl, out);
      return out.add(m);
    }
    case Kind::Binary: {
      Node m = n;
      m.a = subst_node(n.a, v, repl, out);
      m.b = subst_node(n.b, v, repl, out);
      return out.add(m);
    }
    case Kind::Call: {
      Node m = n;
      m.a = subst_node(n.a, v, repl, out);
      if (func_arity(n.fn) == 2) m.b = subst_node(n.b, v, repl, out);
      return out.add(m);
    }
  }
  throw EvalError("corrupt expression");
}

Expr Expr::substitute(Var v, const Expr& replacement) const {
  Expr out;
  if (nodes_.empty()) return out;
  out.root_ = subst_node(root_, v, replacement, out);
  return out;
}

bool Expr::eq_node(std::uint32_t a, const Expr& other, std::uint32_t b) const {
  const Node& x = nodes_[a];
  const Node& y = other.nodes_[b];
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::Constant: return x.value == y.value;
    case Kind::Variable: return x.var == y.var;
    case Kind::Neg: return eq_node(x.a, other, y.a);
    case Kind::Binary:
      return x.op == y.op && eq_node(x.a, other, y.a) && eq_node(x.b, other, y.b);
    case Kind::Call:
      if (x.fn != y.fn) return false;
      if (!eq_node(x.a, other, y.a)) return false;
      return func_arity(x.fn) == 1 || eq_node(x.b, other, y.b);
  }
  return false;
}

bool Expr::operator==(const Expr& other) const {
  if (nodes_.empty() || other.nodes_.empty())
    return nodes_.empty() == other.nodes_.empty();
  return eq_node(root_, other, other.root_);
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over a byte cursor.

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : src_(s) {}

  Expr run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", 0);
    std::uint32_t root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("trailing input", pos_);
    out_.root_ = root;
    return std::move(out_);
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;
  Expr out_;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  std::uint32_t mk_binary(BinOp op, std::uint32_t a, std::uint32_t b) {
    Expr::Node n;
    n.kind = Expr::Kind::Binary;
    n.op = op;
    n.a = a;
    n.b = b;
    return out_.add(n);
  }

  std::uint32_t parse_expr() {
    std::uint32_t lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        std::uint32_t rhs = parse_term();
        lhs = mk_binary(c == '+' ? BinOp::Add : BinOp::Sub, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  std::uint32_t parse_term() {
    std::uint32_t lhs = parse_unary();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        std::uint32_t rhs = parse_unary();
        lhs = mk_binary(c == '*' ? BinOp::Mul : BinOp::Div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  std::uint32_t parse_unary() {
    if (peek() == '-') {
      ++pos_;
      std::uint32_t a = parse_unary();
      if (out_.nodes_[a].kind == Expr::Kind::Constant) {
        out_.nodes_[a].value = -out_.nodes_[a].value;  // canonical form
        return a;
      }
      Expr::Node n;
      n.kind = Expr::Kind::Neg;
      n.a = a;
      return out_.add(n);
    }
    return parse_power();
  }

  std::uint32_t parse_power() {
    std::uint32_t base = parse_atom();
    if (peek() == '^') {
      ++pos_;
      std::uint32_t exp = parse_unary();  // right-assoc; allows x^-2
      return mk_binary(BinOp::Pow, base, exp);
    }
    return base;
  }

  std::uint32_t parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '(') {
      ++pos_;
      std::uint32_t e = parse_expr();
      if (!eat(')')) fail("expected `)`");
      return e;
    }
    fail(std::string("unexpected character `") + c + "`");
  }

  std::uint32_t parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;
      }
    }
    double v = std::strtod(src_.c_str() + start, nullptr);
    if (!std::isfinite(v)) throw ParseError("constant out of range", start);
    Expr::Node n;
    n.kind = Expr::Kind::Constant;
    n.value = v;
    return out_.add(n);
  }

  std::uint32_t parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);

    if (name == "t" || name == "x" || name == "y" || name == "d") {
      Expr::Node n;
      n.kind = Expr::Kind::Variable;
      n.var = name == "t" ? Var::T : name == "x" ? Var::X : name == "y" ? Var::Y : Var::D;
      return out_.add(n);
    }

    struct FuncEntry {
      const char* name;
      Func f;
      bool is_pow;
    };
    static const FuncEntry kFuncs[] = {
        {"exp", Func::Exp, false}, {"log", Func::Log, false},
        {"sqrt", Func::Sqrt, false}, {"abs", Func::Abs, false},
        {"cbrt", Func::Cbrt, false}, {"min", Func::Min, false},
        {"max", Func::Max, false}, {"pow", Func::Exp, true}};

    for (const FuncEntry& kf : kFuncs) {
      if (name != kf.name) continue;
      int arity = kf.is_pow ? 2 : func_arity(kf.f);
      if (!eat('(')) fail("expected `(` after function name");
      std::uint32_t a = parse_expr();
      std::uint32_t b = 0;
      int got = 1;
      if (eat(',')) {
        b = parse_expr();
        got = 2;
      }
      if (!eat(')')) fail("expected `)`");
      if (got != arity)
        throw ParseError("function `" + name + "` expects " + std::to_string(arity) +
                             " argument(s)",
                         start);
      if (kf.is_pow) return mk_binary(BinOp::Pow, a, b);
      Expr::Node n;
      n.kind = Expr::Kind::Call;
      n.fn = kf.f;
      n.a = a;
      n.b = b;
      return out_.add(n);
    }
    throw ParseError("unknown identifier `" + name + "`", start);
  }
};

Expr parse(const std::string& src) { return ExprParser(src).run(); }

}  // namespace sbvp
