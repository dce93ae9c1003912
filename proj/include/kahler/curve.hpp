#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "kahler/expr.hpp"
#include "kahler/surface.hpp"

namespace kahler {

struct CurveSample {
  double s;          // arclength
  Point2 point;      // chart position
  Vec2 tangent;      // unit (in g) tangent, chart components
  double curvature;  // prescribed geodesic curvature k(s)
};

// Arclength-sampled curve on a surface chart; samples are spaced exactly `step` apart.
class Curve {
 public:
  Curve(std::shared_ptr<const Surface2D> surface, std::vector<CurveSample> samples, double step);

  const Surface2D& surface() const { return *surface_; }
  const std::shared_ptr<const Surface2D>& surface_ptr() const { return surface_; }
  const std::vector<CurveSample>& samples() const { return samples_; }
  const CurveSample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  double step() const { return step_; }
  double length() const { return samples_.back().s; }

 private:
  std::shared_ptr<const Surface2D> surface_;
  std::vector<CurveSample> samples_;
  double step_;
};

// Raised when an integrated trajectory leaves the chart.
class DomainExit : public DomainError {
 public:
  DomainExit(double arclength, const std::string& what) : DomainError(what), arclength_(arclength) {}
  double arclength() const noexcept { return arclength_; }

 private:
  double arclength_;
};

// Integrates D_{g'} g' = k(s) j g' with classical RK4, fixed step, starting at p0 with
// chart direction angle theta0. The step is shrunk so that length / step is an integer.
Curve integrate_prescribed_curvature(std::shared_ptr<const Surface2D> surface, Point2 p0, double theta0,
                                     const Expr& curvature, double length, double step = 1e-3);

// Same, with the initial direction given as a chart vector (normalized internally).
Curve integrate_prescribed_curvature(std::shared_ptr<const Surface2D> surface, Point2 p0, Vec2 direction,
                                     const Expr& curvature, double length, double step = 1e-3);

// Geodesic curvature recovered from sample positions alone by central differences,
// k = g(D_{g'} g', j g') / |g'|^3. Valid for 1 <= i <= size - 2.
double curve_curvature(const Curve& c, std::size_t i);

// CSV rows: s,x,y,v1,v2,k with 17 significant digits.
void write_csv(std::ostream& os, const Curve& c);

}  // namespace kahler
