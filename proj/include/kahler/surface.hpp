#pragma once

// Riemannian 2-manifolds given in an isothermal chart, g = lambda(x, y) (dx^2 + dy^2).
//
// Because the chart is conformal, the rotation j by +pi/2 acts on chart components as
// (v1, v2) -> (-v2, v1), and the area form is omega(X, Y) = g(jX, Y).
//
// Christoffel symbols of a conformal chart, with L = log(lambda) / 2:
//
//   G^1_11 =  L_x   G^1_12 = G^1_21 =  L_y   G^1_22 = -L_x
//   G^2_11 = -L_y   G^2_12 = G^2_21 =  L_x   G^2_22 =  L_y
//
// so the four independent values stored in Christoffel determine the rest.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "kahler/expr.hpp"

namespace kahler {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
  friend Vec2 operator*(Vec2 a, double c) { return {c * a.x, c * a.y}; }
  friend Vec2 operator/(Vec2 a, double c) { return {a.x / c, a.y / c}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
// Rotation by +pi/2 in a conformal chart.
inline Vec2 rotate(Vec2 v) { return {-v.y, v.x}; }

// Chart points share the representation of chart vectors.
using Point2 = Vec2;

class ChartDomain {
 public:
  static ChartDomain rect(double xmin, double xmax, double ymin, double ymax);
  // Open disk.
  static ChartDomain disk(double cx, double cy, double radius);
  static ChartDomain whole_plane();

  bool contains(Point2 p) const;
  std::string describe() const;

  enum class Shape { rect, disk };
  Shape shape() const { return shape_; }
  // rect: xmin, xmax, ymin, ymax; disk: cx, cy, radius, unused.
  const std::array<double, 4>& bounds() const { return bounds_; }

 private:
  Shape shape_ = Shape::rect;
  std::array<double, 4> bounds_{};
};

// An area-preserving map from (surface, omega) onto (R^2, dx ^ dy) and its inverse.
// Used to manufacture Lagrangian graphs; known in closed form for the built-in models.
struct DarbouxChart {
  std::function<Point2(Point2)> to_plane;
  std::function<Point2(Point2)> from_plane;
};

// Values of the conformal factor and its derivatives at a point.
struct ConformalJet {
  double lambda, lx, ly, lxx, lxy, lyy;
};

struct Christoffel {
  double g1_11, g1_12, g2_11, g2_12;

  // Gamma(u, v) as a chart vector: components Gamma^k_ij u^i v^j.
  Vec2 apply(Vec2 u, Vec2 v) const;
};

class TangentVec2 {
 public:
  TangentVec2(const class Surface2D& surface, Point2 base, Vec2 components);

  Point2 base() const { return base_; }
  Vec2 components() const { return v_; }
  double norm_squared() const { return lambda_ * dot(v_, v_); }
  TangentVec2 rotated() const;

 private:
  TangentVec2(Point2 base, Vec2 v, double lambda) : base_(base), v_(v), lambda_(lambda) {}
  Point2 base_;
  Vec2 v_;
  double lambda_;
};

class Surface2D {
 public:
  Surface2D(std::string name, Expr lambda, ChartDomain domain, std::optional<DarbouxChart> darboux = std::nullopt);

  // lambda = 1.
  static Surface2D plane();
  // Stereographic chart of the sphere of constant curvature `curvature` > 0.
  static Surface2D sphere(double curvature = 1.0);
  // Poincare disk of constant curvature -`magnitude` < 0.
  static Surface2D hyperbolic(double magnitude = 1.0);

  const std::string& name() const { return name_; }
  const Expr& conformal_factor() const { return lambda_; }
  const ChartDomain& domain() const { return domain_; }
  const std::optional<DarbouxChart>& darboux() const { return darboux_; }

  bool contains(Point2 p) const { return domain_.contains(p); }

  // All of these throw DomainError when p is outside the chart domain, and EvalError
  // if the conformal factor cannot be evaluated there.
  double lambda(Point2 p) const;
  ConformalJet jet(Point2 p) const;
  double metric(Point2 p, Vec2 u, Vec2 v) const { return lambda(p) * dot(u, v); }
  double area_form(Point2 p, Vec2 u, Vec2 v) const { return lambda(p) * cross(u, v); }
  Christoffel christoffel(Point2 p) const;
  double gauss_curvature(Point2 p) const;

  // g-orthonormal oriented frame (e1, e2 = j e1) at p, in chart components.
  std::pair<Vec2, Vec2> orthonormal_frame(Point2 p) const;

 private:
  void require_inside(Point2 p) const;

  std::string name_;
  Expr lambda_;
  Expr lx_, ly_, lxx_, lxy_, lyy_;
  ChartDomain domain_;
  std::optional<DarbouxChart> darboux_;
};

double gauss_curvature(const Surface2D& s, Point2 p);
Christoffel christoffel(const Surface2D& s, Point2 p);

}  // namespace kahler
