#pragma once

// Scalar field expressions over the chart variables x, y and the arclength s.
//
// Grammar (whitespace insignificant):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['-'] INTEGER | '(' ['-'] INTEGER ')'
//   primary := NUMBER | 'x' | 'y' | 's' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := sin | cos | exp | log | sqrt | tanh | cosh | sinh
//
// Binding strength is ^ > unary minus > * / > + -, so "-x^2" is -(x^2).

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "kahler/errors.hpp"

namespace kahler {

enum class Var : unsigned char { x = 0, y = 1, s = 2 };

const char* var_name(Var v) noexcept;

class Bindings {
 public:
  Bindings() = default;

  static Bindings xy(double x, double y) { return Bindings{}.set(Var::x, x).set(Var::y, y); }
  static Bindings arclength(double s) { return Bindings{}.set(Var::s, s); }

  Bindings& set(Var v, double value) {
    values_[static_cast<std::size_t>(v)] = value;
    return *this;
  }
  std::optional<double> get(Var v) const { return values_[static_cast<std::size_t>(v)]; }

 private:
  std::array<std::optional<double>, 3> values_{};
};

class Expr {
 public:
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, call };
  enum class Func { sin, cos, exp, log, sqrt, tanh, cosh, sinh };

  // The zero constant.
  Expr();

  static Expr number(double value);
  static Expr variable(Var v);
  static Expr call(Func f, Expr arg);
  Expr pow(int exponent) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Kind kind() const noexcept;
  bool is_number(double value) const noexcept;
  bool depends_on(Var v) const noexcept;

  // Throws EvalError on unbound variables and on any non-finite intermediate.
  double eval(const Bindings& b) const;

  // Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  // Tree node, defined in expr.cpp.
  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;

  friend Expr differentiate(const Expr& e, Var v);
};

Expr parse_expr(std::string_view text);
double eval_expr(const Expr& e, const Bindings& b);
Expr differentiate(const Expr& e, Var v);

}  // namespace kahler
