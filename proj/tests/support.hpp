#pragma once

// Hand-rolled generators and oracles shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "kahler/product.hpp"
#include "kahler/surface.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  kahler::Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  kahler::Vec2 vec() { return {uniform(-1, 1), uniform(-1, 1)}; }

  kahler::ProductPoint product_point(double r1, double r2) { return {point(-r1, r1), point(-r2, r2)}; }
  kahler::ProductVec product_vec(const kahler::ProductPoint& p) { return {p, vec(), vec()}; }

  // Random expression in x and y built from operations that stay finite on [-1, 1]^2.
  std::string smooth_expr(int depth) {
    if (depth == 0) {
      switch (integer(0, 3)) {
        case 0: return "x";
        case 1: return "y";
        case 2: return std::to_string(integer(1, 5));
        default: return "(" + std::to_string(uniform(-2, 2)) + ")";
      }
    }
    const std::string a = smooth_expr(depth - 1), b = smooth_expr(depth - 1);
    switch (integer(0, 9)) {
      case 0: return "(" + a + " + " + b + ")";
      case 1: return "(" + a + " - " + b + ")";
      case 2: return "(" + a + " * " + b + ")";
      case 3: return "(" + a + ") / (2 + sin(" + b + "))";
      case 4: return "sin(" + a + ")";
      case 5: return "cos(" + a + ")";
      case 6: return "tanh(" + a + ")";
      case 7: return "exp(sin(" + a + "))";
      case 8: return "sqrt(1 + (" + a + ")^2)";
      default: return "log(2 + cos(" + a + "))";
    }
  }

 private:
  std::mt19937_64 rng_;
};

inline std::shared_ptr<const kahler::Surface2D> plane() {
  return std::make_shared<const kahler::Surface2D>(kahler::Surface2D::plane());
}
inline std::shared_ptr<const kahler::Surface2D> sphere(double c = 1.0) {
  return std::make_shared<const kahler::Surface2D>(kahler::Surface2D::sphere(c));
}
inline std::shared_ptr<const kahler::Surface2D> hyperbolic(double m = 1.0) {
  return std::make_shared<const kahler::Surface2D>(kahler::Surface2D::hyperbolic(m));
}
inline std::shared_ptr<const kahler::KahlerProduct> product(std::shared_ptr<const kahler::Surface2D> a,
                                                            std::shared_ptr<const kahler::Surface2D> b, int eps) {
  return std::make_shared<const kahler::KahlerProduct>(std::move(a), std::move(b), eps);
}

// Fresnel integrals int_0^s cos(t^2/2) dt and int_0^s sin(t^2/2) dt from their power series,
// summed in long double.
inline std::pair<double, double> fresnel_series(double s) {
  long double c = 0, sn = 0;
  const long double x = s;
  for (int n = 0; n < 80; ++n) {
    const long double sign = (n % 2 == 0) ? 1 : -1;
    // cos(u) = sum (-1)^n u^(2n)/(2n)!, u = t^2/2
    long double fc = 1, fs = 1;
    for (int k = 1; k <= 2 * n; ++k) fc *= k;
    for (int k = 1; k <= 2 * n + 1; ++k) fs *= k;
    c += sign * std::pow(x, 4 * n + 1) / (fc * std::pow(2.0L, 2 * n) * (4 * n + 1));
    sn += sign * std::pow(x, 4 * n + 3) / (fs * std::pow(2.0L, 2 * n + 1) * (4 * n + 3));
  }
  return {static_cast<double>(c), static_cast<double>(sn)};
}

}  // namespace testing
