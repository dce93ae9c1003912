#include "kahler/product.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace kahler {

ProductVec ProductVec::operator+(const ProductVec& o) const { return {base, x1 + o.x1, x2 + o.x2}; }
ProductVec ProductVec::operator-(const ProductVec& o) const { return {base, x1 - o.x1, x2 - o.x2}; }

namespace {

double frobenius(const std::array<double, 9>& m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double WeylBlocks::plus_norm() const { return frobenius(plus); }
double WeylBlocks::minus_norm() const { return frobenius(minus); }

KahlerProduct::KahlerProduct(std::shared_ptr<const Surface2D> sigma1, std::shared_ptr<const Surface2D> sigma2, int eps)
    : sigma1_(std::move(sigma1)), sigma2_(std::move(sigma2)), eps_(eps) {
  if (!sigma1_ || !sigma2_) throw PreconditionError("product needs two surfaces");
  if (eps_ != 1 && eps_ != -1) throw PreconditionError("eps must be +1 or -1");
}

void KahlerProduct::require_same_base(const ProductVec& a, const ProductVec& b) const {
  if (!(a.base == b.base)) throw PreconditionError("tangent vectors have different base points");
}

double KahlerProduct::metric(const ProductVec& X, const ProductVec& Y) const {
  require_same_base(X, Y);
  return sigma1_->metric(X.base.p1, X.x1, Y.x1) + eps_ * sigma2_->metric(X.base.p2, X.x2, Y.x2);
}

ProductVec KahlerProduct::apply_J(const ProductVec& X) const { return {X.base, rotate(X.x1), rotate(X.x2)}; }

double KahlerProduct::omega(const ProductVec& X, const ProductVec& Y) const { return metric(apply_J(X), Y); }

double KahlerProduct::riemann(const ProductVec& X, const ProductVec& Y, const ProductVec& Z,
                              const ProductVec& W) const {
  require_same_base(X, Y);
  require_same_base(X, Z);
  require_same_base(X, W);
  const ProductPoint& p = X.base;
  const double l1 = sigma1_->lambda(p.p1), l2 = sigma2_->lambda(p.p2);
  const double k1 = sigma1_->gauss_curvature(p.p1), k2 = sigma2_->gauss_curvature(p.p2);
  auto factor = [](double l, double k, Vec2 x, Vec2 y, Vec2 z, Vec2 w) {
    return k * l * l * (dot(y, z) * dot(x, w) - dot(x, z) * dot(y, w));
  };
  return factor(l1, k1, X.x1, Y.x1, Z.x1, W.x1) + eps_ * factor(l2, k2, X.x2, Y.x2, Z.x2, W.x2);
}

ProductVec KahlerProduct::christoffel(const ProductVec& X, const ProductVec& Y) const {
  require_same_base(X, Y);
  return {X.base, sigma1_->christoffel(X.base.p1).apply(X.x1, Y.x1),
          sigma2_->christoffel(X.base.p2).apply(X.x2, Y.x2)};
}

double KahlerProduct::ricci(const ProductVec& X, const ProductVec& Y, const Frame4& frame) const {
  double sum = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    sum += frame.signs[a] * riemann(frame.e[a], X, Y, frame.e[a]);
  return sum;
}

double KahlerProduct::ricci(const ProductVec& X, const ProductVec& Y) const {
  return ricci(X, Y, adapted_frame(X.base));
}

double KahlerProduct::ricci_closed_form(const ProductVec& X, const ProductVec& Y) const {
  require_same_base(X, Y);
  const ProductPoint& p = X.base;
  return sigma1_->gauss_curvature(p.p1) * sigma1_->metric(p.p1, X.x1, Y.x1) +
         sigma2_->gauss_curvature(p.p2) * sigma2_->metric(p.p2, X.x2, Y.x2);
}

double KahlerProduct::ricci_form(const ProductVec& X, const ProductVec& Y) const {
  return 0.5 * ricci(apply_J(X), Y);
}

double KahlerProduct::scalar_curvature(const Frame4& frame) const {
  double sum = 0.0;
  for (std::size_t a = 0; a < 4; ++a) sum += frame.signs[a] * ricci(frame.e[a], frame.e[a], frame);
  return sum;
}

double KahlerProduct::scalar_curvature(const ProductPoint& p) const { return scalar_curvature(adapted_frame(p)); }

double KahlerProduct::scalar_curvature_closed_form(const ProductPoint& p) const {
  return 2.0 * (sigma1_->gauss_curvature(p.p1) + eps_ * sigma2_->gauss_curvature(p.p2));
}

// Riemannian:  E1 = (e1, v1 + v2)/sqrt3, E3 = (e1 - e2, -v1)/sqrt3
// Neutral:     E1 = (e1, v1 + v2),       E3 = (e1 - e2,  v1)
// with E2 = J E1 and E4 = J E3 in both cases.
Frame4 KahlerProduct::adapted_frame(const ProductPoint& p) const {
  const auto [e1, e2] = sigma1_->orthonormal_frame(p.p1);
  const auto [v1, v2] = sigma2_->orthonormal_frame(p.p2);
  Frame4 f;
  if (eps_ == 1) {
    const double c = 1.0 / std::sqrt(3.0);
    f.e[0] = {p, c * e1, c * (v1 + v2)};
    f.e[2] = {p, c * (e1 - e2), -c * v1};
    f.signs = {1, 1, 1, 1};
  } else {
    f.e[0] = {p, e1, v1 + v2};
    f.e[2] = {p, e1 - e2, v1};
    f.signs = {-1, -1, 1, 1};
  }
  f.e[1] = apply_J(f.e[0]);
  f.e[3] = apply_J(f.e[2]);
  return f;
}

// Weyl tensor in the adapted frame,
//
//   W_ijkl = R_ijkl - 1/2 (Ric_il G_jk + Ric_jk G_il - Ric_ik G_jl - Ric_jl G_ik)
//                   + (R / 6)(G_il G_jk - G_ik G_jl),
//
// contracted against the 2-form bases
//
//   Riemannian: e1(+-) = (e12 +- e34)/sqrt2, e2(+-) = (e13 -+ e24)/sqrt2, e3(+-) = (e14 +- e23)/sqrt2
//   Neutral:    e1(+-) = (e12 +- e34)/sqrt2, e2(+-) = (e13 +- e24)/sqrt2, e3(+-) = (e14 -+ e23)/sqrt2
//
// The bivector pairing sums over ordered index pairs, W(a, b) = sum_{ijkl} a_ij b_kl W_ijlk,
// so that a round S2 x S2 gives W+ = R diag(1/3, -1/6, -1/6).
WeylBlocks KahlerProduct::weyl_blocks(const ProductPoint& p) const {
  const Frame4 f = adapted_frame(p);
  double R[4][4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) R[i][j][k][l] = riemann(f.e[i], f.e[j], f.e[k], f.e[l]);

  double ric[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) s += f.signs[a] * R[a][i][j][a];
      ric[i][j] = s;
    }
  double scal = 0.0;
  for (int i = 0; i < 4; ++i) scal += f.signs[i] * ric[i][i];

  auto G = [&](int i, int j) { return i == j ? static_cast<double>(f.signs[i]) : 0.0; };
  double W[4][4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          W[i][j][k][l] = R[i][j][k][l] -
                          0.5 * (ric[i][l] * G(j, k) + ric[j][k] * G(i, l) - ric[i][k] * G(j, l) - ric[j][l] * G(i, k)) +
                          scal / 6.0 * (G(i, l) * G(j, k) - G(i, k) * G(j, l));

  struct Term {
    int i, j;
    double c;
  };
  using Form = std::array<Term, 2>;
  const double r = 1.0 / std::sqrt(2.0);
  const int s2 = eps_ == 1 ? -1 : 1;  // sign of e24 in e2(+)
  const int s3 = eps_ == 1 ? 1 : -1;  // sign of e23 in e3(+)
  const std::array<Form, 3> plus{Form{Term{0, 1, r}, Term{2, 3, r}}, Form{Term{0, 2, r}, Term{1, 3, s2 * r}},
                                 Form{Term{0, 3, r}, Term{1, 2, s3 * r}}};
  const std::array<Form, 3> minus{Form{Term{0, 1, r}, Term{2, 3, -r}}, Form{Term{0, 2, r}, Term{1, 3, -s2 * r}},
                                  Form{Term{0, 3, r}, Term{1, 2, -s3 * r}}};

  auto pair = [&](const Form& a, const Form& b) {
    double s = 0.0;
    for (const Term& ta : a)
      for (const Term& tb : b) s += ta.c * tb.c * W[ta.i][ta.j][tb.j][tb.i];
    // a_ij b_kl over ordered pairs counts each antisymmetric pair twice on each side.
    return 2.0 * s;
  };

  WeylBlocks out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      out.plus[3 * a + b] = pair(plus[a], plus[b]);
      out.minus[3 * a + b] = pair(minus[a], minus[b]);
      out.mixed[3 * a + b] = pair(plus[a], minus[b]);
    }
  return out;
}

std::pair<int, int> KahlerProduct::signature(const ProductPoint& p) const {
  const std::array<ProductVec, 4> basis{ProductVec{p, {1, 0}, {0, 0}}, ProductVec{p, {0, 1}, {0, 0}},
                                        ProductVec{p, {0, 0}, {1, 0}}, ProductVec{p, {0, 0}, {0, 1}}};
  Eigen::Matrix4d gram;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gram(i, j) = metric(basis[i], basis[j]);
  const Eigen::Vector4d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    if (ev[i] > 0) ++pos;
    else if (ev[i] < 0) ++neg;
  }
  return {pos, neg};
}

Frame4 build_adapted_frame(const KahlerProduct& K, const ProductPoint& p) { return K.adapted_frame(p); }
WeylBlocks weyl_blocks(const KahlerProduct& K, const ProductPoint& p) { return K.weyl_blocks(p); }

double conformal_flatness_residual(const KahlerProduct& K, std::span<const ProductPoint> samples) {
  if (samples.empty()) throw PreconditionError("conformal_flatness_residual needs at least one sample");
  double worst = 0.0;
  for (const ProductPoint& p : samples) {
    const WeylBlocks w = K.weyl_blocks(p);
    worst = std::max({worst, w.plus_norm(), w.minus_norm()});
  }
  return worst;
}

VectorField constant_field(Vec2 x1, Vec2 x2) {
  return [x1, x2](const ProductPoint& q) { return ProductVec{q, x1, x2}; };
}

VectorField frame_constant_field(const KahlerProduct& K, Vec2 x1, Vec2 x2) {
  auto s1 = K.sigma1_ptr();
  auto s2 = K.sigma2_ptr();
  return [s1, s2, x1, x2](const ProductPoint& q) {
    return ProductVec{q, x1 / std::sqrt(s1->lambda(q.p1)), x2 / std::sqrt(s2->lambda(q.p2))};
  };
}

namespace {

ProductPoint shifted(const ProductPoint& p, const ProductVec& dir, double t) {
  return {p.p1 + t * dir.x1, p.p2 + t * dir.x2};
}

// D_X Y: central difference of the components of Y along the chart direction X(p).
ProductVec directional(const ProductPoint& p, const ProductVec& x, const VectorField& Y, double h) {
  const ProductVec fwd = Y(shifted(p, x, h));
  const ProductVec bwd = Y(shifted(p, x, -h));
  return {p, (fwd.x1 - bwd.x1) / (2.0 * h), (fwd.x2 - bwd.x2) / (2.0 * h)};
}

}  // namespace

ProductVec lie_bracket(const ProductPoint& p, const VectorField& X, const VectorField& Y, double h) {
  return directional(p, X(p), Y, h) - directional(p, Y(p), X, h);
}

ProductVec nijenhuis(const KahlerProduct& K, const ProductPoint& p, const VectorField& X, const VectorField& Y,
                     double h) {
  const VectorField JX = [&](const ProductPoint& q) { return K.apply_J(X(q)); };
  const VectorField JY = [&](const ProductPoint& q) { return K.apply_J(Y(q)); };
  return lie_bracket(p, JX, JY, h) - K.apply_J(lie_bracket(p, JX, Y, h)) - K.apply_J(lie_bracket(p, X, JY, h)) -
         lie_bracket(p, X, Y, h);
}

ProductVec nijenhuis(const KahlerProduct& K, const ProductPoint& p, const ProductVec& X, const ProductVec& Y,
                     double h) {
  return nijenhuis(K, p, constant_field(X.x1, X.x2), constant_field(Y.x1, Y.x2), h);
}

ProductVec covariant_derivative(const KahlerProduct& K, const ProductVec& X, const VectorField& Y, double h) {
  return directional(X.base, X, Y, h) + K.christoffel(X, Y(X.base));
}

double chart_norm(const ProductVec& v) { return std::sqrt(dot(v.x1, v.x1) + dot(v.x2, v.x2)); }

}  // namespace kahler
