#include "kahler/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace kahler {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

const char* var_name(Var v) noexcept {
  switch (v) {
    case Var::x: return "x";
    case Var::y: return "y";
    case Var::s: return "s";
  }
  return "?";
}

struct Expr::Node {
  Kind kind = Kind::number;
  double value = 0.0;
  Var var = Var::x;
  Func func = Func::sin;
  int exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::sin: return "sin";
    case Expr::Func::cos: return "cos";
    case Expr::Func::exp: return "exp";
    case Expr::Func::log: return "log";
    case Expr::Func::sqrt: return "sqrt";
    case Expr::Func::tanh: return "tanh";
    case Expr::Func::cosh: return "cosh";
    case Expr::Func::sinh: return "sinh";
  }
  return "?";
}

std::optional<Expr::Func> lookup_func(std::string_view name) {
  static constexpr std::pair<std::string_view, Expr::Func> table[] = {
      {"sin", Expr::Func::sin},   {"cos", Expr::Func::cos},   {"exp", Expr::Func::exp},
      {"log", Expr::Func::log},   {"sqrt", Expr::Func::sqrt}, {"tanh", Expr::Func::tanh},
      {"cosh", Expr::Func::cosh}, {"sinh", Expr::Func::sinh}};
  for (const auto& [n, f] : table)
    if (n == name) return f;
  return std::nullopt;
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(EvalError::Kind::domain, std::string("non-finite result in ") + what);
  return v;
}

double int_pow(double base, int e) {
  double r = 1.0, x = base;
  for (unsigned k = static_cast<unsigned>(e < 0 ? -e : e); k != 0; k >>= 1) {
    if (k & 1u) r *= x;
    x *= x;
  }
  return e < 0 ? 1.0 / r : r;
}

double eval_node(const Expr::Node& n, const Bindings& b) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::number: return n.value;
    case K::variable: {
      auto v = b.get(n.var);
      if (!v) throw EvalError(EvalError::Kind::unbound_variable, std::string("unbound variable '") + var_name(n.var) + "'");
      return *v;
    }
    case K::add: return checked(eval_node(*n.a, b) + eval_node(*n.b, b), "addition");
    case K::sub: return checked(eval_node(*n.a, b) - eval_node(*n.b, b), "subtraction");
    case K::mul: return checked(eval_node(*n.a, b) * eval_node(*n.b, b), "multiplication");
    case K::div: {
      const double num = eval_node(*n.a, b);
      const double den = eval_node(*n.b, b);
      if (den == 0.0) throw EvalError(EvalError::Kind::domain, "division by zero");
      return checked(num / den, "division");
    }
    case K::pow: {
      const double base = eval_node(*n.a, b);
      if (base == 0.0 && n.exponent < 0) throw EvalError(EvalError::Kind::domain, "division by zero in negative power");
      return checked(int_pow(base, n.exponent), "power");
    }
    case K::neg: return -eval_node(*n.a, b);
    case K::call: {
      const double x = eval_node(*n.a, b);
      switch (n.func) {
        case Expr::Func::sin: return std::sin(x);
        case Expr::Func::cos: return std::cos(x);
        case Expr::Func::exp: return checked(std::exp(x), "exp");
        case Expr::Func::log:
          if (x <= 0.0) throw EvalError(EvalError::Kind::domain, "log of non-positive argument");
          return std::log(x);
        case Expr::Func::sqrt:
          if (x < 0.0) throw EvalError(EvalError::Kind::domain, "sqrt of negative argument");
          return std::sqrt(x);
        case Expr::Func::tanh: return std::tanh(x);
        case Expr::Func::cosh: return checked(std::cosh(x), "cosh");
        case Expr::Func::sinh: return checked(std::sinh(x), "sinh");
      }
  }
  }
  throw EvalError(EvalError::Kind::domain, "corrupt expression node");
}

bool depends(const Expr::Node& n, Var v) {
  if (n.kind == Expr::Kind::variable) return n.var == v;
  return (n.a && depends(*n.a, v)) || (n.b && depends(*n.b, v));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  return v < 0 ? "(" + s + ")" : s;
}

void print(const Expr::Node& n, std::string& out) {
  using K = Expr::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.a, out);
    out += op;
    print(*n.b, out);
    out += ')';
  };
  switch (n.kind) {
    case K::number: out += format_number(n.value); return;
    case K::variable: out += var_name(n.var); return;
    case K::add: binary(" + "); return;
    case K::sub: binary(" - "); return;
    case K::mul: binary(" * "); return;
    case K::div: binary(" / "); return;
    case K::pow:
      out += '(';
      print(*n.a, out);
      out += '^';
      out += n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent);
      out += ')';
      return;
    case K::neg:
      out += "(-";
      print(*n.a, out);
      out += ')';
      return;
    case K::call:
      out += func_name(n.func);
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
  }
}

// Recursive-descent parser; offsets are byte positions in the input.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError(ParseError::Kind::syntax, pos_, "empty expression");
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(ParseError::Kind::syntax, pos_, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(ParseError::Kind::syntax, pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = lhs + parse_product();
      else if (accept('-')) lhs = lhs - parse_product();
      else return lhs;
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = lhs * parse_unary();
      else if (accept('/')) lhs = lhs / parse_unary();
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    const int n = parse_exponent();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^')
      throw ParseError(ParseError::Kind::syntax, pos_, "chained exponent; parenthesize the base");
    return base.pow(n);
  }

  int parse_exponent() {
    const bool paren = accept('(');
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (start == pos_) throw ParseError(ParseError::Kind::syntax, start, "integer exponent expected");
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      throw ParseError(ParseError::Kind::syntax, pos_, "exponent must be an integer");
    int n = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
    if (ec != std::errc{}) throw ParseError(ParseError::Kind::syntax, start, "exponent out of range");
    if (paren) expect(')');
    return negative ? -n : n;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(ParseError::Kind::syntax, pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw ParseError(ParseError::Kind::syntax, pos_, std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (exp_start == pos_) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_)
      throw ParseError(ParseError::Kind::syntax, start, "malformed number");
    return Expr::number(v);
  }

  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (auto f = lookup_func(name)) {
      if (!accept('('))
        throw ParseError(ParseError::Kind::arity, start, "function '" + std::string(name) + "' takes one argument");
      Expr arg = parse_sum();
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',')
        throw ParseError(ParseError::Kind::arity, pos_, "function '" + std::string(name) + "' takes one argument");
      expect(')');
      return Expr::call(*f, std::move(arg));
    }

    Expr leaf;
    if (name == "x") leaf = Expr::variable(Var::x);
    else if (name == "y") leaf = Expr::variable(Var::y);
    else if (name == "s") leaf = Expr::variable(Var::s);
    else if (name == "pi") leaf = Expr::number(std::numbers::pi);
    else throw ParseError(ParseError::Kind::unknown_identifier, start, "unknown identifier '" + std::string(name) + "'");

    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(')
      throw ParseError(ParseError::Kind::arity, pos_, "'" + std::string(name) + "' is not a function");
    return leaf;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : Expr(number(0.0)) {}

Expr Expr::number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::number;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->func = f;
  n->a = std::move(arg.node_);
  return Expr(std::move(n));
}

Expr Expr::pow(int exponent) const {
  auto n = std::make_shared<Node>();
  n->kind = Kind::pow;
  n->exponent = exponent;
  n->a = node_;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::add;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::sub;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator*(const Expr& a, const Expr& b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::mul;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::div;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::neg;
  n->a = a.node_;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_number(double value) const noexcept { return node_->kind == Kind::number && node_->value == value; }

bool Expr::depends_on(Var v) const noexcept { return depends(*node_, v); }

double Expr::eval(const Bindings& b) const { return eval_node(*node_, b); }

std::string Expr::to_string() const {
  std::string out;
  print(*node_, out);
  return out;
}

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

double eval_expr(const Expr& e, const Bindings& b) { return e.eval(b); }

// Derivatives are built with light constant folding (0 and 1 elimination) so that
// repeated differentiation of conformal factors stays compact.
namespace {

double constant_value(const Expr& e, bool& ok) {
  ok = e.kind() == Expr::Kind::number;
  return ok ? e.eval({}) : 0.0;
}

Expr add(const Expr& a, const Expr& b) {
  bool ka, kb;
  const double va = constant_value(a, ka), vb = constant_value(b, kb);
  if (ka && kb) return Expr::number(va + vb);
  if (ka && va == 0.0) return b;
  if (kb && vb == 0.0) return a;
  return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
  bool ka, kb;
  const double va = constant_value(a, ka), vb = constant_value(b, kb);
  if (ka && kb) return Expr::number(va - vb);
  if (kb && vb == 0.0) return a;
  if (ka && va == 0.0) return -b;
  return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
  bool ka, kb;
  const double va = constant_value(a, ka), vb = constant_value(b, kb);
  if (ka && kb) return Expr::number(va * vb);
  if ((ka && va == 0.0) || (kb && vb == 0.0)) return Expr::number(0.0);
  if (ka && va == 1.0) return b;
  if (kb && vb == 1.0) return a;
  return a * b;
}

Expr div(const Expr& a, const Expr& b) {
  bool ka;
  const double va = constant_value(a, ka);
  if (ka && va == 0.0) return Expr::number(0.0);
  return a / b;
}

Expr neg(const Expr& a) {
  bool ka;
  const double va = constant_value(a, ka);
  if (ka) return Expr::number(-va);
  return -a;
}

}  // namespace

Expr differentiate(const Expr& e, Var v) {
  using K = Expr::Kind;
  using F = Expr::Func;
  const Expr::Node& n = *e.node_;
  if (!depends(n, v)) return Expr::number(0.0);

  const Expr a = n.a ? Expr(n.a) : Expr();
  const Expr b = n.b ? Expr(n.b) : Expr();
  switch (n.kind) {
    case K::number: return Expr::number(0.0);
    case K::variable: return Expr::number(n.var == v ? 1.0 : 0.0);
    case K::add: return add(differentiate(a, v), differentiate(b, v));
    case K::sub: return sub(differentiate(a, v), differentiate(b, v));
    case K::mul: return add(mul(differentiate(a, v), b), mul(a, differentiate(b, v)));
    case K::div: {
      const Expr da = differentiate(a, v);
      const Expr db = differentiate(b, v);
      return sub(div(da, b), div(mul(a, db), b.pow(2)));
    }
    case K::pow: {
      if (n.exponent == 0) return Expr::number(0.0);
      const Expr outer = n.exponent == 1 ? Expr::number(1.0) : a.pow(n.exponent - 1);
      return mul(mul(Expr::number(n.exponent), outer), differentiate(a, v));
    }
    case K::neg: return neg(differentiate(a, v));
    case K::call: {
      const Expr da = differentiate(a, v);
      switch (n.func) {
        case F::sin: return mul(Expr::call(F::cos, a), da);
        case F::cos: return neg(mul(Expr::call(F::sin, a), da));
        case F::exp: return mul(e, da);
        case F::log: return div(da, a);
        case F::sqrt: return div(da, mul(Expr::number(2.0), e));
        case F::tanh: return div(da, Expr::call(F::cosh, a).pow(2));
        case F::cosh: return mul(Expr::call(F::sinh, a), da);
        case F::sinh: return mul(Expr::call(F::cosh, a), da);
      }
    }
  }
  return Expr::number(0.0);
}

}  // namespace kahler
