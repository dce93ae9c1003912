#pragma once

// The product Kahler structure on Sigma1 x Sigma2:
//
//   G(X, Y)     = g1(X1, Y1) + eps g2(X2, Y2)
//   J(X)        = (j1 X1, j2 X2)
//   Omega(X, Y) = omega1(X1, Y1) + eps omega2(X2, Y2) = G(JX, Y)
//
// eps = +1 gives a Riemannian metric, eps = -1 a neutral one of signature (2, 2).
//
// Curvature conventions: R(X, Y)Z = grad_X grad_Y Z - grad_Y grad_X Z - grad_[X,Y] Z, so on each
// factor R_i(X, Y)Z = kappa_i (g_i(Y, Z) X - g_i(X, Z) Y) and riemann(X, Y, Y, X) is the
// sectional numerator. Ric(X, Y) = sum_a |E_a|^2 G(R(E_a, X)Y, E_a), which gives Ric = kappa g
// on a round factor.

#include <array>
#include <functional>
#include <memory>
#include <span>

#include "kahler/surface.hpp"

namespace kahler {

struct ProductPoint {
  Point2 p1;
  Point2 p2;
  friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
};

struct ProductVec {
  ProductPoint base;
  Vec2 x1;
  Vec2 x2;

  ProductVec operator+(const ProductVec& o) const;
  ProductVec operator-(const ProductVec& o) const;
  ProductVec operator-() const { return {base, -x1, -x2}; }
  friend ProductVec operator*(double c, const ProductVec& v) { return {v.base, c * v.x1, c * v.x2}; }
};

struct Frame4 {
  std::array<ProductVec, 4> e;
  std::array<int, 4> signs;  // |E_a|^2 in {+1, -1}
};

// Weyl tensor blocks on self-dual and anti-self-dual 2-forms, in the orthonormal 2-form
// bases attached to the adapted frame. row-major.
struct WeylBlocks {
  std::array<double, 9> plus;
  std::array<double, 9> minus;
  // Cross block (plus x minus). Vanishes identically for a true Weyl tensor.
  std::array<double, 9> mixed;

  double plus_norm() const;
  double minus_norm() const;
};

class KahlerProduct {
 public:
  KahlerProduct(std::shared_ptr<const Surface2D> sigma1, std::shared_ptr<const Surface2D> sigma2, int eps);

  const Surface2D& sigma1() const { return *sigma1_; }
  const Surface2D& sigma2() const { return *sigma2_; }
  const std::shared_ptr<const Surface2D>& sigma1_ptr() const { return sigma1_; }
  const std::shared_ptr<const Surface2D>& sigma2_ptr() const { return sigma2_; }
  int eps() const { return eps_; }

  bool contains(const ProductPoint& p) const { return sigma1_->contains(p.p1) && sigma2_->contains(p.p2); }

  double metric(const ProductVec& X, const ProductVec& Y) const;
  ProductVec apply_J(const ProductVec& X) const;
  double omega(const ProductVec& X, const ProductVec& Y) const;
  double riemann(const ProductVec& X, const ProductVec& Y, const ProductVec& Z, const ProductVec& W) const;

  // Levi-Civita connection applied to a pair of vectors at the same base point: chart
  // components of Gamma(X, Y) factor by factor.
  ProductVec christoffel(const ProductVec& X, const ProductVec& Y) const;

  double ricci(const ProductVec& X, const ProductVec& Y) const;
  double ricci(const ProductVec& X, const ProductVec& Y, const Frame4& frame) const;
  // kappa1 g1(X1, Y1) + kappa2 g2(X2, Y2), which the frame contraction reduces to (the eps
  // weights cancel). Cheaper, for inner loops.
  double ricci_closed_form(const ProductVec& X, const ProductVec& Y) const;
  // Ricci form rho(X, Y) = Ric(JX, Y) / 2, normalized so that d a_H = Phi^* rho on Lagrangian
  // surfaces with a_H = G(JH, .) and 2H the trace of the second fundamental form.
  double ricci_form(const ProductVec& X, const ProductVec& Y) const;
  double scalar_curvature(const ProductPoint& p) const;
  double scalar_curvature(const Frame4& frame) const;
  // 2 (kappa1 + eps kappa2).
  double scalar_curvature_closed_form(const ProductPoint& p) const;

  Frame4 adapted_frame(const ProductPoint& p) const;
  WeylBlocks weyl_blocks(const ProductPoint& p) const;

  // Numbers of positive and negative eigenvalues of the Gram matrix of the chart basis.
  std::pair<int, int> signature(const ProductPoint& p) const;

 private:
  void require_same_base(const ProductVec& a, const ProductVec& b) const;

  std::shared_ptr<const Surface2D> sigma1_;
  std::shared_ptr<const Surface2D> sigma2_;
  int eps_;
};

Frame4 build_adapted_frame(const KahlerProduct& K, const ProductPoint& p);
WeylBlocks weyl_blocks(const KahlerProduct& K, const ProductPoint& p);

// Max over the samples of the Frobenius norms of both Weyl blocks.
double conformal_flatness_residual(const KahlerProduct& K, std::span<const ProductPoint> samples);

using VectorField = std::function<ProductVec(const ProductPoint&)>;

// Field with the given chart components everywhere.
VectorField constant_field(Vec2 x1, Vec2 x2);
// Field with constant components in the g-orthonormal chart frames of each factor.
VectorField frame_constant_field(const KahlerProduct& K, Vec2 x1, Vec2 x2);

// Lie bracket [X, Y] at p by central differences of the fields along each other.
ProductVec lie_bracket(const ProductPoint& p, const VectorField& X, const VectorField& Y, double h = 1e-5);

// N_J(X, Y) = [JX, JY] - J[JX, Y] - J[X, JY] - [X, Y], brackets by finite differences.
ProductVec nijenhuis(const KahlerProduct& K, const ProductPoint& p, const VectorField& X, const VectorField& Y,
                     double h = 1e-5);
ProductVec nijenhuis(const KahlerProduct& K, const ProductPoint& p, const ProductVec& X, const ProductVec& Y,
                     double h = 1e-5);

// grad_X Y at p for a vector X at p and a field Y, by central differences.
ProductVec covariant_derivative(const KahlerProduct& K, const ProductVec& X, const VectorField& Y, double h = 1e-5);

// Euclidean norm of chart components, used for residual reporting.
double chart_norm(const ProductVec& v);

}  // namespace kahler
