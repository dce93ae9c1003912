#include <cmath>
#include <vector>

#include "doctest.h"
#include "kahler/product.hpp"
#include "support.hpp"

using namespace kahler;
using testing::Gen;

namespace {

std::shared_ptr<const KahlerProduct> s2xs2(int eps) { return testing::product(testing::sphere(), testing::sphere(), eps); }
std::shared_ptr<const KahlerProduct> s2xh2(int eps) {
  return testing::product(testing::sphere(), testing::hyperbolic(), eps);
}
std::shared_ptr<const KahlerProduct> h2xh2(int eps) {
  return testing::product(testing::hyperbolic(), testing::hyperbolic(), eps);
}

std::vector<std::shared_ptr<const KahlerProduct>> all_products() {
  std::vector<std::shared_ptr<const KahlerProduct>> out;
  for (int eps : {1, -1}) {
    out.push_back(testing::product(testing::plane(), testing::plane(), eps));
    out.push_back(s2xs2(eps));
    out.push_back(s2xh2(eps));
    out.push_back(h2xh2(eps));
    out.push_back(testing::product(testing::plane(), testing::sphere(), eps));
    out.push_back(testing::product(testing::plane(), testing::hyperbolic(), eps));
  }
  return out;
}

// Riemann tensor of one conformal factor from finite differences of finite-difference
// Christoffel symbols: R(d_i, d_j) d_k = R^l_ijk d_l.
struct RiemannOracle {
  const Surface2D& S;
  double h = 1e-4;

  // Gamma[l][i][j] at p, from finite differences of lambda.
  std::array<std::array<std::array<double, 2>, 2>, 2> gamma(Point2 p) const {
    const double e = 1e-6, l = S.lambda(p);
    const double ax = (S.lambda({p.x + e, p.y}) - S.lambda({p.x - e, p.y})) / (2 * e * 2 * l);
    const double ay = (S.lambda({p.x, p.y + e}) - S.lambda({p.x, p.y - e})) / (2 * e * 2 * l);
    std::array<std::array<std::array<double, 2>, 2>, 2> g{};
    g[0][0][0] = ax, g[0][0][1] = g[0][1][0] = ay, g[0][1][1] = -ax;
    g[1][0][0] = -ay, g[1][0][1] = g[1][1][0] = ax, g[1][1][1] = ay;
    return g;
  }

  double R(Point2 p, int l, int i, int j, int k) const {
    auto d = [&](int dir, int a, int b, int c) {
      const Point2 e = dir == 0 ? Point2{h, 0} : Point2{0, h};
      return (gamma(p + e)[a][b][c] - gamma(p - e)[a][b][c]) / (2 * h);
    };
    const auto g = gamma(p);
    double r = d(i, l, j, k) - d(j, l, i, k);
    for (int m = 0; m < 2; ++m) r += g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k];
    return r;
  }

  // g(R(X, Y)Z, W)
  double operator()(Point2 p, Vec2 X, Vec2 Y, Vec2 Z, Vec2 W) const {
    const double x[2] = {X.x, X.y}, y[2] = {Y.x, Y.y}, z[2] = {Z.x, Z.y}, w[2] = {W.x, W.y};
    double s = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) s += x[i] * y[j] * z[k] * R(p, l, i, j, k) * w[l];
    return S.lambda(p) * s;
  }
};

ProductPoint shifted(const ProductPoint& p, const ProductVec& v, double t) { return {p.p1 + t * v.x1, p.p2 + t * v.x2}; }

ProductVec at(const ProductVec& v, const ProductPoint& p) { return {p, v.x1, v.x2}; }

}  // namespace

TEST_CASE("metric, J and omega literal examples") {
  const auto K = s2xh2(1);
  const ProductPoint p{{0.3, 0.1}, {0.2, -0.4}};
  const ProductVec X{p, {1, 0}, {0, 0}};
  CHECK(K->metric(X, X) == doctest::Approx(K->sigma1().lambda(p.p1)));
  const auto N = s2xh2(-1);
  const ProductVec Y{p, {0, 0}, {1, 0}};
  CHECK(N->metric(Y, Y) == doctest::Approx(-N->sigma2().lambda(p.p2)));
  const ProductVec JX = K->apply_J(X);
  CHECK(JX.x1 == Vec2{0, 1});
  CHECK(JX.x2 == Vec2{0, 0});
  const auto flat = testing::product(testing::plane(), testing::plane(), 1);
  const ProductPoint o{{0, 0}, {0, 0}};
  CHECK(flat->omega({o, {1, 0}, {0, 0}}, {o, {0, 1}, {0, 0}}) == 1.0);
  CHECK_THROWS(K->metric(X, ProductVec{{{0, 0}, {0, 0}}, {1, 0}, {0, 0}}));
}

TEST_CASE("algebraic identities of G, J and Omega at random points") {
  Gen gen(31);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 100; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      const ProductVec X = gen.product_vec(p), Y = gen.product_vec(p);
      CHECK(std::abs(K->metric(X, Y) - K->metric(Y, X)) < 1e-15 * (1 + std::abs(K->metric(X, Y))));
      const ProductVec JJX = K->apply_J(K->apply_J(X));
      CHECK(chart_norm(JJX + X) < 1e-15);
      const double g = K->metric(X, Y);
      CHECK(std::abs(K->metric(K->apply_J(X), K->apply_J(Y)) - g) < 1e-12 * (1 + std::abs(g)));
      CHECK(K->omega(X, X) == 0.0);
      const double o = K->omega(X, Y);
      CHECK(std::abs(K->omega(K->apply_J(X), K->apply_J(Y)) - o) < 1e-12 * (1 + std::abs(o)));
      CHECK(std::abs(K->omega(X, Y) - K->metric(K->apply_J(X), Y)) < 1e-12 * (1 + std::abs(o)));
      // Omega(X, JX) = G(JX, JX) = G(X, X).
      CHECK(std::abs(K->omega(X, K->apply_J(X)) - K->metric(X, X)) < 1e-12 * (1 + std::abs(K->metric(X, X))));
    }
  }
}

TEST_CASE("signature of the product metric") {
  Gen gen(32);
  for (int k = 0; k < 20; ++k) {
    const ProductPoint p = gen.product_point(0.6, 0.6);
    CHECK(s2xh2(1)->signature(p) == std::pair<int, int>{4, 0});
    CHECK(s2xh2(-1)->signature(p) == std::pair<int, int>{2, 2});
  }
}

TEST_CASE("riemann literal examples") {
  const ProductPoint p{{0.2, 0.3}, {-0.1, 0.25}};
  const auto flat = testing::product(testing::plane(), testing::plane(), 1);
  Gen gen(33);
  for (int k = 0; k < 20; ++k) {
    const ProductVec a = gen.product_vec(p), b = gen.product_vec(p), c = gen.product_vec(p), d = gen.product_vec(p);
    CHECK(flat->riemann(a, b, c, d) == 0.0);
  }
  const auto K = s2xs2(1);
  const auto [e1, e2] = K->sigma1().orthonormal_frame(p.p1);
  const ProductVec X{p, e1, {0, 0}}, Y{p, e2, {0, 0}};
  CHECK(K->riemann(X, Y, Y, X) == doctest::Approx(1.0).epsilon(1e-12));
  const ProductVec V{p, {0, 0}, {1, 0.5}};
  CHECK(K->riemann(X, V, V, X) == 0.0);
  CHECK(K->riemann(X, V, X, V) == 0.0);
}

TEST_CASE("riemann against the finite-difference oracle on a curved user metric") {
  const auto user = std::make_shared<const Surface2D>("user", parse_expr("1 + 0.4*sin(x)*cos(y) + 0.2*y^2"),
                                                      ChartDomain::rect(-2, 2, -2, 2));
  const auto K = testing::product(user, testing::hyperbolic(), -1);
  const RiemannOracle oracle{*user};
  Gen gen(34);
  for (int k = 0; k < 20; ++k) {
    const ProductPoint p{gen.point(-1, 1), gen.point(-0.5, 0.5)};
    const Vec2 x = gen.vec(), y = gen.vec(), z = gen.vec(), w = gen.vec();
    const double got = K->riemann({p, x, {0, 0}}, {p, y, {0, 0}}, {p, z, {0, 0}}, {p, w, {0, 0}});
    CHECK(std::abs(got - oracle(p.p1, x, y, z, w)) < 1e-5);
  }
}

TEST_CASE("riemann symmetries and first Bianchi identity") {
  Gen gen(35);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 20; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      const ProductVec X = gen.product_vec(p), Y = gen.product_vec(p), Z = gen.product_vec(p),
                       W = gen.product_vec(p);
      const double r = K->riemann(X, Y, Z, W);
      const double tol = 1e-10 * (1 + std::abs(r)) * 10;
      CHECK(std::abs(r + K->riemann(Y, X, Z, W)) < tol);
      CHECK(std::abs(r + K->riemann(X, Y, W, Z)) < tol);
      CHECK(std::abs(r - K->riemann(Z, W, X, Y)) < tol);
      CHECK(std::abs(r + K->riemann(Y, Z, X, W) + K->riemann(Z, X, Y, W)) < tol);
    }
  }
}

TEST_CASE("scalar and ricci curvature") {
  Gen gen(36);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 100; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      CHECK(std::abs(K->scalar_curvature(p) - K->scalar_curvature_closed_form(p)) < 1e-9);
    }
  }
  const ProductPoint p{{0.2, 0.3}, {-0.1, 0.25}};
  CHECK(s2xs2(1)->scalar_curvature(p) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(s2xh2(1)->scalar_curvature(p)) < 1e-12);
  CHECK(std::abs(h2xh2(-1)->scalar_curvature(p)) < 1e-12);
  // Riemannian adapted frame: Ric(E1, E1) = (kappa1 + 2 kappa2) / 3.
  for (const auto& K : {s2xh2(1), s2xs2(1), testing::product(testing::plane(), testing::sphere(), 1)}) {
    const Frame4 f = K->adapted_frame(p);
    const double want = (K->sigma1().gauss_curvature(p.p1) + 2 * K->sigma2().gauss_curvature(p.p2)) / 3;
    CHECK(K->ricci(f.e[0], f.e[0]) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("ricci is frame independent and matches the closed form") {
  Gen gen(37);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 20; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      const Frame4 f = K->adapted_frame(p);
      // Rotate within span(E1, JE1) and span(E3, JE3); both stay orthonormal with the same signs.
      const double a = gen.uniform(0, 6.3), b = gen.uniform(0, 6.3);
      Frame4 g = f;
      g.e[0] = std::cos(a) * f.e[0] + std::sin(a) * f.e[1];
      g.e[1] = K->apply_J(g.e[0]);
      g.e[2] = std::cos(b) * f.e[2] + std::sin(b) * f.e[3];
      g.e[3] = K->apply_J(g.e[2]);
      const ProductVec X = gen.product_vec(p), Y = gen.product_vec(p);
      const double r = K->ricci(X, Y);
      CHECK(std::abs(K->ricci(X, Y, g) - r) < 1e-9 * (1 + std::abs(r)));
      CHECK(std::abs(K->ricci_closed_form(X, Y) - r) < 1e-9 * (1 + std::abs(r)));
    }
  }
}

TEST_CASE("adapted frames") {
  Gen gen(38);
  for (const auto& K : all_products()) {
    const ProductPoint p = gen.product_point(0.6, 0.6);
    const Frame4 f = K->adapted_frame(p);
    if (K->eps() == 1) CHECK(f.signs == std::array<int, 4>{1, 1, 1, 1});
    else CHECK(f.signs == std::array<int, 4>{-1, -1, 1, 1});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(K->metric(f.e[i], f.e[j]) - (i == j ? f.signs[i] : 0)) < 1e-12);
    CHECK(chart_norm(f.e[1] - K->apply_J(f.e[0])) < 1e-15);
    CHECK(chart_norm(f.e[3] - K->apply_J(f.e[2])) < 1e-15);
  }
}

TEST_CASE("weyl blocks and conformal flatness") {
  Gen gen(39);
  auto samples = [&](int n) {
    std::vector<ProductPoint> pts;
    for (int k = 0; k < n; ++k) pts.push_back(gen.product_point(0.6, 0.6));
    return pts;
  };
  CHECK(conformal_flatness_residual(*s2xh2(1), samples(50)) < 1e-8);
  CHECK(conformal_flatness_residual(*h2xh2(-1), samples(50)) < 1e-8);
  CHECK(conformal_flatness_residual(*s2xs2(-1), samples(50)) < 1e-8);
  for (int eps : {1, -1})
    CHECK(conformal_flatness_residual(*testing::product(testing::plane(), testing::plane(), eps), samples(10)) < 1e-12);
  const WeylBlocks w = s2xs2(1)->weyl_blocks({{0.2, 0.1}, {-0.3, 0.4}});
  CHECK(w.plus[0] == doctest::Approx(4.0 / 3).epsilon(1e-9));
  CHECK(w.plus[4] == doctest::Approx(-2.0 / 3).epsilon(1e-9));
  CHECK(w.plus[8] == doctest::Approx(-2.0 / 3).epsilon(1e-9));
  CHECK(conformal_flatness_residual(*s2xs2(1), samples(5)) >= 0.1);
  const auto unequal = testing::product(testing::sphere(), testing::sphere(2.0), -1);
  CHECK(conformal_flatness_residual(*unequal, samples(10)) >= 0.1);
  // Both blocks trace free as operators, cross block zero. In neutral signature the second and
  // third basis 2-forms have squared norm -1.
  for (const auto& K : all_products()) {
    const WeylBlocks b = K->weyl_blocks(gen.product_point(0.5, 0.5));
    const double eta = K->eps();
    CHECK(std::abs(b.plus[0] + eta * (b.plus[4] + b.plus[8])) < 1e-10);
    CHECK(std::abs(b.minus[0] + eta * (b.minus[4] + b.minus[8])) < 1e-10);
    for (double m : b.mixed) CHECK(std::abs(m) < 1e-10);
  }
  CHECK_THROWS(conformal_flatness_residual(*s2xh2(1), std::vector<ProductPoint>{}));
}

TEST_CASE("J is integrable") {
  Gen gen(40);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 100; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      const Vec2 a = gen.vec(), b = gen.vec(), c = gen.vec(), d = gen.vec();
      CHECK(chart_norm(nijenhuis(*K, p, frame_constant_field(*K, a, b), frame_constant_field(*K, c, d))) < 1e-6);
    }
    const ProductPoint p = gen.product_point(0.5, 0.5);
    const ProductVec X = gen.product_vec(p);
    CHECK(chart_norm(nijenhuis(*K, p, X, X)) == 0.0);
    CHECK(chart_norm(nijenhuis(*K, p, X, K->apply_J(X))) < 1e-6);
  }
}

TEST_CASE("J is parallel") {
  Gen gen(41);
  for (const auto& K : all_products()) {
    for (int k = 0; k < 20; ++k) {
      const ProductPoint p = gen.product_point(0.6, 0.6);
      const ProductVec X = gen.product_vec(p), Z = gen.product_vec(p);
      const VectorField Y = frame_constant_field(*K, gen.vec(), gen.vec());
      const VectorField JY = [&](const ProductPoint& q) { return K->apply_J(Y(q)); };
      const ProductVec nabla_J = covariant_derivative(*K, X, JY) - K->apply_J(covariant_derivative(*K, X, Y));
      CHECK(std::abs(K->metric(nabla_J, Z)) < 1e-6);
    }
  }
}

TEST_CASE("Omega is closed") {
  Gen gen(42);
  const double h = 1e-5;
  for (const auto& K : all_products()) {
    for (int k = 0; k < 20; ++k) {
      const ProductPoint p = gen.product_point(0.5, 0.5);
      const ProductVec X = gen.product_vec(p), Y = gen.product_vec(p), Z = gen.product_vec(p);
      // Constant chart fields commute, so dOmega(X, Y, Z) = X Omega(Y, Z) - Y Omega(X, Z) + Z Omega(X, Y).
      auto deriv = [&](const ProductVec& along, const ProductVec& a, const ProductVec& b) {
        const ProductPoint fwd = shifted(p, along, h), bwd = shifted(p, along, -h);
        return (K->omega(at(a, fwd), at(b, fwd)) - K->omega(at(a, bwd), at(b, bwd))) / (2 * h);
      };
      CHECK(std::abs(deriv(X, Y, Z) - deriv(Y, X, Z) + deriv(Z, X, Y)) < 1e-6);
    }
  }
}
