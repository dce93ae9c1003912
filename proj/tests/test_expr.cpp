#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kahler/expr.hpp"
#include "support.hpp"

using namespace kahler;

namespace {

double at(const Expr& e, double x, double y) { return e.eval(Bindings::xy(x, y)); }

double central(const Expr& e, Var v, double x, double y, double h = 1e-5) {
  if (v == Var::x) return (at(e, x + h, y) - at(e, x - h, y)) / (2 * h);
  return (at(e, x, y + h) - at(e, x, y - h)) / (2 * h);
}

ParseError parse_failure(const char* text) {
  try {
    parse_expr(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for " << text);
  return ParseError(ParseError::Kind::syntax, 0, "");
}

}  // namespace

TEST_CASE("parse and evaluate literal examples") {
  CHECK(at(parse_expr("4/(1+x^2+y^2)^2"), 0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(at(parse_expr("sin(x)*y"), std::numbers::pi / 2, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(at(parse_expr("x+y"), 1, 2) == 3.0);
  const Expr el = parse_expr("exp(log(x))");
  CHECK(std::abs(at(el, 2.5, 0) - 2.5) < 1e-15);
}

TEST_CASE("precedence and associativity") {
  CHECK(at(parse_expr("-x^2"), 3, 0) == -9.0);
  CHECK(at(parse_expr("2*-x"), 3, 0) == -6.0);
  CHECK(at(parse_expr("8/4/2"), 0, 0) == 1.0);
  CHECK(at(parse_expr("8-4-2"), 0, 0) == 2.0);
  CHECK(at(parse_expr("1 + 2 * 3 ^ 2"), 0, 0) == 19.0);
  CHECK(at(parse_expr("  x\t*\n y "), 2, 5) == 10.0);
  CHECK(at(parse_expr("x^-2"), 2, 0) == 0.25);
  CHECK(at(parse_expr("pi"), 0, 0) == std::numbers::pi);
  CHECK(parse_expr("s^2 + 1").eval(Bindings::arclength(3)) == 10.0);
}

TEST_CASE("parse errors carry kind and offset") {
  ParseError e = parse_failure("4/(1");
  CHECK(e.kind() == ParseError::Kind::syntax);
  CHECK(e.offset() == 4);
  CHECK(parse_failure("").kind() == ParseError::Kind::syntax);
  CHECK(parse_failure("z + 1").kind() == ParseError::Kind::unknown_identifier);
  CHECK(parse_failure("z + 1").offset() == 0);
  CHECK(parse_failure("sin(x, y)").kind() == ParseError::Kind::arity);
  CHECK(parse_failure("x(2)").kind() == ParseError::Kind::arity);
  CHECK(parse_failure("x^1.5").kind() == ParseError::Kind::syntax);
  CHECK(parse_failure("1 +").kind() == ParseError::Kind::syntax);
}

TEST_CASE("evaluation errors are reported, never non-finite") {
  const Expr inv = parse_expr("1/x");
  CHECK_THROWS_AS(at(inv, 0, 0), EvalError);
  try {
    at(parse_expr("log(x)"), -1, 0);
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::domain);
  }
  CHECK_THROWS_AS(at(parse_expr("log(x)"), 0, 0), EvalError);
  CHECK_THROWS_AS(at(parse_expr("sqrt(x)"), -0.5, 0), EvalError);
  CHECK(at(parse_expr("sqrt(x)"), 0, 0) == 0.0);
  CHECK_THROWS_AS(at(parse_expr("exp(x)"), 1000, 0), EvalError);
  try {
    parse_expr("x + s").eval(Bindings::xy(1, 2));
    FAIL("unbound s");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::unbound_variable);
  }
}

TEST_CASE("differentiate literal examples") {
  CHECK(at(differentiate(parse_expr("x^2*y"), Var::x), 3, 2) == doctest::Approx(12.0));
  CHECK(at(differentiate(parse_expr("4/(1+x^2+y^2)^2"), Var::x), 0, 0) == 0.0);
  // Hand derivative of the hyperbolic factor: d/dx = 16 x / (1 - r^2)^3.
  const Expr dh = differentiate(parse_expr("4/(1-x^2-y^2)^2"), Var::x);
  CHECK(at(dh, 0.5, 0.1) == doctest::Approx(16 * 0.5 / std::pow(1 - 0.26, 3)).epsilon(1e-14));
  CHECK(differentiate(parse_expr("x*y"), Var::s).eval(Bindings::xy(1, 1)) == 0.0);
}

TEST_CASE("derivative matches central differences on random expressions") {
  testing::Gen gen(11);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const Expr e = parse_expr(gen.smooth_expr(3));
    const Expr dx = differentiate(e, Var::x), dy = differentiate(e, Var::y);
    for (int p = 0; p < 100; ++p) {
      const double x = gen.uniform(-1, 1), y = gen.uniform(-1, 1);
      const double scale = std::max(1.0, std::abs(at(e, x, y)));
      CHECK(std::abs(at(dx, x, y) - central(e, Var::x, x, y)) < 1e-6 * scale);
      CHECK(std::abs(at(dy, x, y) - central(e, Var::y, x, y)) < 1e-6 * scale);
      ++checked;
    }
  }
  CHECK(checked == 4000);
}

TEST_CASE("mixed partials commute") {
  testing::Gen gen(12);
  for (int k = 0; k < 40; ++k) {
    const Expr e = parse_expr(gen.smooth_expr(3));
    const Expr xy = differentiate(differentiate(e, Var::x), Var::y);
    const Expr yx = differentiate(differentiate(e, Var::y), Var::x);
    for (int p = 0; p < 20; ++p) {
      const double x = gen.uniform(-1, 1), y = gen.uniform(-1, 1);
      const double a = at(xy, x, y), b = at(yx, x, y);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("print-parse round trip") {
  testing::Gen gen(13);
  for (int k = 0; k < 60; ++k) {
    const Expr e = parse_expr(gen.smooth_expr(3));
    const Expr back = parse_expr(e.to_string());
    for (int p = 0; p < 10; ++p) {
      const double x = gen.uniform(-1, 1), y = gen.uniform(-1, 1);
      const double a = at(e, x, y);
      CHECK(std::abs(at(back, x, y) - a) <= 1e-15 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("linearity and product rule of differentiate") {
  testing::Gen gen(14);
  for (int k = 0; k < 30; ++k) {
    const Expr e1 = parse_expr(gen.smooth_expr(2)), e2 = parse_expr(gen.smooth_expr(2));
    const double c = gen.uniform(-3, 3);
    const Expr lin = differentiate(Expr::number(c) * e1 + e2, Var::x);
    const Expr prod = differentiate(e1 * e2, Var::y);
    const Expr d1x = differentiate(e1, Var::x), d2x = differentiate(e2, Var::x);
    const Expr d1y = differentiate(e1, Var::y), d2y = differentiate(e2, Var::y);
    for (int p = 0; p < 10; ++p) {
      const double x = gen.uniform(-1, 1), y = gen.uniform(-1, 1);
      const double want_lin = c * at(d1x, x, y) + at(d2x, x, y);
      CHECK(std::abs(at(lin, x, y) - want_lin) <= 1e-12 * std::max(1.0, std::abs(want_lin)));
      const double want_prod = at(d1y, x, y) * at(e2, x, y) + at(e1, x, y) * at(d2y, x, y);
      CHECK(std::abs(at(prod, x, y) - want_prod) <= 1e-12 * std::max(1.0, std::abs(want_prod)));
    }
  }
}
