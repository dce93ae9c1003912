#include "kahler/curve.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace kahler {

Curve::Curve(std::shared_ptr<const Surface2D> surface, std::vector<CurveSample> samples, double step)
    : surface_(std::move(surface)), samples_(std::move(samples)), step_(step) {
  if (!surface_) throw PreconditionError("curve needs a surface");
  if (samples_.size() < 2) throw PreconditionError("curve needs at least two samples");
}

namespace {

struct State {
  Point2 p;
  Vec2 v;
};

State operator+(const State& a, const State& b) { return {a.p + b.p, a.v + b.v}; }
State operator*(double c, const State& a) { return {c * a.p, c * a.v}; }

bool finite(const State& s) {
  return std::isfinite(s.p.x) && std::isfinite(s.p.y) && std::isfinite(s.v.x) && std::isfinite(s.v.y);
}

}  // namespace

Curve integrate_prescribed_curvature(std::shared_ptr<const Surface2D> surface, Point2 p0, Vec2 direction,
                                     const Expr& curvature, double length, double step) {
  if (!surface) throw PreconditionError("integrate_prescribed_curvature: null surface");
  if (!(length > 0.0)) throw PreconditionError("curve length must be positive");
  if (!(step > 0.0)) throw PreconditionError("integration step must be positive");
  if (!(dot(direction, direction) > 0.0)) throw PreconditionError("initial direction must be non-zero");
  const Surface2D& S = *surface;
  if (!S.contains(p0)) throw DomainError("curve start point outside chart domain of " + S.name());

  const auto n = static_cast<std::size_t>(std::ceil(length / step - 1e-9));
  const double h = length / static_cast<double>(n);

  auto k_at = [&](double s) { return curvature.eval(Bindings::arclength(s)); };

  // x' = v,  v' = -Gamma(v, v) + k j v
  auto rhs = [&](double s, const State& y) -> State {
    if (!S.contains(y.p)) {
      std::ostringstream os;
      os << "trajectory left chart domain of " << S.name() << " near arclength " << s;
      throw DomainExit(s, os.str());
    }
    const Christoffel g = S.christoffel(y.p);
    return {y.v, k_at(s) * rotate(y.v) - g.apply(y.v, y.v)};
  };

  auto normalize = [&](State y) {
    y.v = y.v / std::sqrt(S.lambda(y.p) * dot(y.v, y.v));
    return y;
  };

  std::vector<CurveSample> samples;
  samples.reserve(n + 1);
  State y = normalize({p0, direction});
  samples.push_back({0.0, y.p, y.v, k_at(0.0)});

  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * h;
    const State k1 = rhs(s, y);
    const State k2 = rhs(s + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = rhs(s + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = rhs(s + h, y + h * k3);
    State next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double s_next = static_cast<double>(i + 1) * h;
    if (!finite(next)) throw DomainExit(s_next, "non-finite curve state at arclength " + std::to_string(s_next));
    if (!S.contains(next.p)) {
      std::ostringstream os;
      os << "trajectory left chart domain of " << S.name() << " at arclength " << s_next;
      throw DomainExit(s_next, os.str());
    }
    y = normalize(next);
    samples.push_back({s_next, y.p, y.v, k_at(s_next)});
  }
  return Curve(std::move(surface), std::move(samples), h);
}

Curve integrate_prescribed_curvature(std::shared_ptr<const Surface2D> surface, Point2 p0, double theta0,
                                     const Expr& curvature, double length, double step) {
  return integrate_prescribed_curvature(std::move(surface), p0, Vec2{std::cos(theta0), std::sin(theta0)}, curvature,
                                        length, step);
}

double curve_curvature(const Curve& c, std::size_t i) {
  if (i < 1 || i + 1 >= c.size()) throw PreconditionError("curve_curvature: sample index out of range");
  const double h = c.step();
  const Point2 prev = c[i - 1].point, here = c[i].point, next = c[i + 1].point;
  const Vec2 d1 = (next - prev) / (2.0 * h);
  const Vec2 d2 = (next - 2.0 * here + prev) / (h * h);
  const Surface2D& S = c.surface();
  const Vec2 accel = d2 + S.christoffel(here).apply(d1, d1);
  const double lambda = S.lambda(here);
  const double speed = std::sqrt(lambda * dot(d1, d1));
  return lambda * dot(accel, rotate(d1)) / (speed * speed * speed);
}

void write_csv(std::ostream& os, const Curve& c) {
  os << "s,x,y,v1,v2,k\n";
  char line[256];
  for (const CurveSample& p : c.samples()) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.s, p.point.x, p.point.y,
                  p.tangent.x, p.tangent.y, p.curvature);
    os << line;
  }
}

}  // namespace kahler
