#include "kahler/surface.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kahler {

ChartDomain ChartDomain::rect(double xmin, double xmax, double ymin, double ymax) {
  if (!(xmin < xmax && ymin < ymax)) throw PreconditionError("empty rectangular chart domain");
  ChartDomain d;
  d.shape_ = Shape::rect;
  d.bounds_ = {xmin, xmax, ymin, ymax};
  return d;
}

ChartDomain ChartDomain::disk(double cx, double cy, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("disk chart domain needs a positive radius");
  ChartDomain d;
  d.shape_ = Shape::disk;
  d.bounds_ = {cx, cy, radius, 0.0};
  return d;
}

ChartDomain ChartDomain::whole_plane() {
  const double inf = std::numeric_limits<double>::infinity();
  return rect(-inf, inf, -inf, inf);
}

bool ChartDomain::contains(Point2 p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  if (shape_ == Shape::rect)
    return p.x >= bounds_[0] && p.x <= bounds_[1] && p.y >= bounds_[2] && p.y <= bounds_[3];
  const double dx = p.x - bounds_[0], dy = p.y - bounds_[1];
  return dx * dx + dy * dy < bounds_[2] * bounds_[2];
}

std::string ChartDomain::describe() const {
  std::ostringstream os;
  if (shape_ == Shape::rect)
    os << "rect [" << bounds_[0] << ", " << bounds_[1] << "] x [" << bounds_[2] << ", " << bounds_[3] << "]";
  else
    os << "disk center (" << bounds_[0] << ", " << bounds_[1] << ") radius " << bounds_[2];
  return os.str();
}

Vec2 Christoffel::apply(Vec2 u, Vec2 v) const {
  // G^1_22 = -g1_11, G^2_22 = g1_12 (see header).
  const double k1 = g1_11 * u.x * v.x + g1_12 * (u.x * v.y + u.y * v.x) - g1_11 * u.y * v.y;
  const double k2 = g2_11 * u.x * v.x + g2_12 * (u.x * v.y + u.y * v.x) + g1_12 * u.y * v.y;
  return {k1, k2};
}

TangentVec2::TangentVec2(const Surface2D& surface, Point2 base, Vec2 components)
    : base_(base), v_(components), lambda_(surface.lambda(base)) {}

TangentVec2 TangentVec2::rotated() const { return TangentVec2(base_, rotate(v_), lambda_); }

Surface2D::Surface2D(std::string name, Expr lambda, ChartDomain domain, std::optional<DarbouxChart> darboux)
    : name_(std::move(name)),
      lambda_(std::move(lambda)),
      domain_(domain),
      darboux_(std::move(darboux)) {
  if (lambda_.depends_on(Var::s)) throw PreconditionError("conformal factor may only depend on x and y");
  lx_ = differentiate(lambda_, Var::x);
  ly_ = differentiate(lambda_, Var::y);
  lxx_ = differentiate(lx_, Var::x);
  lxy_ = differentiate(lx_, Var::y);
  lyy_ = differentiate(ly_, Var::y);
}

Surface2D Surface2D::plane() {
  DarbouxChart identity{[](Point2 p) { return p; }, [](Point2 p) { return p; }};
  return Surface2D("plane", Expr::number(1.0), ChartDomain::whole_plane(), identity);
}

// Area of the stereographic disk of chart radius r is 2 r^2 / (1 + r^2) (unit sphere); the
// radial rescaling p -> 2 p / sqrt(1 + r^2) carries it to a Euclidean disk of equal area.
Surface2D Surface2D::sphere(double curvature) {
  if (!(curvature > 0.0)) throw PreconditionError("sphere curvature must be positive");
  const double c = curvature;
  Expr r2 = Expr::variable(Var::x).pow(2) + Expr::variable(Var::y).pow(2);
  Expr lambda = Expr::number(4.0 / c) / (Expr::number(1.0) + r2).pow(2);
  DarbouxChart d{
      [c](Point2 p) { return p * (2.0 / std::sqrt(c * (1.0 + dot(p, p)))); },
      [c](Point2 q) {
        const Point2 u = q * std::sqrt(c);
        return u / std::sqrt(4.0 - dot(u, u));
      }};
  std::string name = curvature == 1.0 ? "sphere" : "sphere(k=" + std::to_string(curvature) + ")";
  return Surface2D(std::move(name), std::move(lambda), ChartDomain::disk(0.0, 0.0, 1e3), std::move(d));
}

// Hyperbolic disk area of chart radius r is 2 r^2 / (1 - r^2).
Surface2D Surface2D::hyperbolic(double magnitude) {
  if (!(magnitude > 0.0)) throw PreconditionError("hyperbolic curvature magnitude must be positive");
  const double c = magnitude;
  Expr r2 = Expr::variable(Var::x).pow(2) + Expr::variable(Var::y).pow(2);
  Expr lambda = Expr::number(4.0 / c) / (Expr::number(1.0) - r2).pow(2);
  DarbouxChart d{
      [c](Point2 p) { return p * (2.0 / std::sqrt(c * (1.0 - dot(p, p)))); },
      [c](Point2 q) {
        const Point2 u = q * std::sqrt(c);
        return u / std::sqrt(4.0 + dot(u, u));
      }};
  std::string name = magnitude == 1.0 ? "hyperbolic" : "hyperbolic(k=-" + std::to_string(magnitude) + ")";
  return Surface2D(std::move(name), std::move(lambda), ChartDomain::disk(0.0, 0.0, 1.0), std::move(d));
}

void Surface2D::require_inside(Point2 p) const {
  if (!domain_.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") outside chart domain of " << name_ << " (" << domain_.describe() << ")";
    throw DomainError(os.str());
  }
}

double Surface2D::lambda(Point2 p) const {
  require_inside(p);
  const double l = lambda_.eval(Bindings::xy(p.x, p.y));
  if (!(l > 0.0)) throw DomainError("conformal factor of " + name_ + " is not positive");
  return l;
}

ConformalJet Surface2D::jet(Point2 p) const {
  const double l = lambda(p);
  const Bindings b = Bindings::xy(p.x, p.y);
  return {l, lx_.eval(b), ly_.eval(b), lxx_.eval(b), lxy_.eval(b), lyy_.eval(b)};
}

Christoffel Surface2D::christoffel(Point2 p) const {
  require_inside(p);
  const Bindings b = Bindings::xy(p.x, p.y);
  const double l = lambda(p);
  const double ax = lx_.eval(b) / (2.0 * l);
  const double ay = ly_.eval(b) / (2.0 * l);
  return {ax, ay, -ay, ax};
}

// kappa = -(1 / (2 lambda)) Laplacian(log lambda)
double Surface2D::gauss_curvature(Point2 p) const {
  const ConformalJet j = jet(p);
  const double lap_log = (j.lxx + j.lyy) / j.lambda - (j.lx * j.lx + j.ly * j.ly) / (j.lambda * j.lambda);
  return -lap_log / (2.0 * j.lambda);
}

std::pair<Vec2, Vec2> Surface2D::orthonormal_frame(Point2 p) const {
  const double inv = 1.0 / std::sqrt(lambda(p));
  return {{inv, 0.0}, {0.0, inv}};
}

double gauss_curvature(const Surface2D& s, Point2 p) { return s.gauss_curvature(p); }
Christoffel christoffel(const Surface2D& s, Point2 p) { return s.christoffel(p); }

}  // namespace kahler
