#include "kahler/variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "json.hpp"

namespace kahler {

TestFunction::TestFunction(std::size_t ns, std::size_t nt, std::vector<double> values)
    : ns_(ns), nt_(nt), values_(std::move(values)) {
  if (values_.size() != ns_ * nt_) throw PreconditionError("test function size does not match its grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("test function has a non-finite value");
  }
}

TestFunction TestFunction::sample(const Grid& grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid.ns * grid.nt, 0.0);
  for (std::size_t i = 2; i + 2 < grid.ns; ++i)
    for (std::size_t j = 2; j + 2 < grid.nt; ++j) v[i * grid.nt + j] = f(grid.s(i), grid.t(j));
  return TestFunction(grid.ns, grid.nt, std::move(v));
}

TestFunction TestFunction::zero(const Grid& grid) {
  return TestFunction(grid.ns, grid.nt, std::vector<double>(grid.ns * grid.nt, 0.0));
}

double TestFunction::at(std::ptrdiff_t i, std::ptrdiff_t j) const {
  if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(ns_) || j >= static_cast<std::ptrdiff_t>(nt_)) return 0.0;
  return values_[static_cast<std::size_t>(i) * nt_ + static_cast<std::size_t>(j)];
}

bool TestFunction::compact_support() const {
  for (std::size_t i = 0; i < ns_; ++i) {
    for (std::size_t j = 0; j < nt_; ++j) {
      const bool collar = i < 2 || j < 2 || i + 2 >= ns_ || j + 2 >= nt_;
      if (collar && values_[i * nt_ + j] != 0.0) return false;
    }
  }
  return true;
}

TestFunction TestFunction::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return TestFunction(ns_, nt_, std::move(v));
}

namespace {

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

void check_shape(const Grid& g, const TestFunction& u) {
  if (u.ns() != g.ns || u.nt() != g.nt) throw PreconditionError("test function grid does not match the immersion");
  if (!u.compact_support()) throw PreconditionError("test function support touches the two-node boundary collar");
}

}  // namespace

SecondVariation::SecondVariation(const Immersion& imm, Formula formula)
    : formula_(formula), grid_(imm.grid()), eps_(imm.product().eps()) {
  const KahlerProduct& K = imm.product();
  if (formula_ == Formula::rank_one) {
    if (imm.kind() != ImmersionKind::rank_one) throw PreconditionError("rank-one formula needs a rank-one immersion");
    const Curve& c1 = imm.curve_s();
    const Curve& c2 = imm.curve_t();
    for (const CurveSample& p : c1.samples()) {
      kappa1_.push_back(K.sigma1().gauss_curvature(p.point));
      k_phi_.push_back(p.curvature);
    }
    for (const CurveSample& p : c2.samples()) {
      kappa2_.push_back(K.sigma2().gauss_curvature(p.point));
      k_psi_.push_back(p.curvature);
    }
    return;
  }

  nodes_.resize(grid_.ns * grid_.nt);
  for (std::size_t i = 0; i < grid_.ns; ++i) {
    for (std::size_t j = 0; j < grid_.nt; ++j) {
      NodeGeometry& n = nodes_[i * grid_.nt + j];
      const NodeIndex idx{i, j};
      InducedMetric g{};
      try {
        g = induced_metric(imm, idx);
      } catch (const DegenerateError& e) {
        if (degenerate_.empty()) degenerate_ = e.what();
        continue;
      }
      const double det = g.det();
      if (std::abs(det) < 1e-12) continue;
      n.g_ss = g.ss, n.g_st = g.st, n.g_tt = g.tt;
      n.inv_ss = g.tt / det, n.inv_st = -g.st / det, n.inv_tt = g.ss / det;
      n.area = std::sqrt(std::abs(det));
      const NodeJet& jet = imm.jet(idx);
      // Ric = kappa1 g1 + kappa2 g2, with the curvatures evaluated once per node.
      const Point2 p1 = jet.point.p1, p2 = jet.point.p2;
      const double k1 = K.sigma1().gauss_curvature(p1), k2 = K.sigma2().gauss_curvature(p2);
      auto ric = [&](const ProductVec& X, const ProductVec& Y) {
        return k1 * K.sigma1().metric(p1, X.x1, Y.x1) + k2 * K.sigma2().metric(p2, X.x2, Y.x2);
      };
      n.ric_ss = ric(jet.ds, jet.ds);
      n.ric_st = ric(jet.ds, jet.dt);
      n.ric_tt = ric(jet.dt, jet.dt);
      n.h = second_fundamental(imm, idx);
      const ProductVec two_h = 2.0 * mean_curvature(imm, idx);
      // Coordinates of 2H in (J Phi_s, J Phi_t) from G(2H, J Phi_k) = alpha G_sk + beta G_tk.
      const double cs = K.metric(two_h, K.apply_J(jet.ds));
      const double ct = K.metric(two_h, K.apply_J(jet.dt));
      n.alpha = n.inv_ss * cs + n.inv_st * ct;
      n.beta = n.inv_st * cs + n.inv_tt * ct;
      n.valid = true;
    }
  }
}

double SecondVariation::operator()(const TestFunction& u) const {
  check_shape(grid_, u);
  return formula_ == Formula::rank_one ? rank_one(u) : general(u);
}

double SecondVariation::rank_one(const TestFunction& u) const {
  const double e = eps_;
  const double hs = grid_.hs, ht = grid_.ht;
  const std::size_t nt = grid_.nt;
  const std::vector<double>& v = u.values();
  // The collar is zero, so the integrand vanishes on the outer ring and edge weights drop out.
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < grid_.ns; ++i) {
    const double a1 = -kappa1_[i] - k_phi_[i] * k_phi_[i];
    for (std::size_t j = 1; j + 1 < nt; ++j) {
      const std::size_t c = i * nt + j;
      const double us = (v[c + nt] - v[c - nt]) / (2.0 * hs);
      const double ut = (v[c + 1] - v[c - 1]) / (2.0 * ht);
      const double uss = (v[c + nt] - 2.0 * v[c] + v[c - nt]) / (hs * hs);
      const double utt = (v[c + 1] - 2.0 * v[c] + v[c - 1]) / (ht * ht);
      const double lap = uss + e * utt;
      sum += lap * lap + us * us * a1 + ut * ut * (-kappa2_[j] - k_psi_[j] * k_psi_[j]) +
             2.0 * e * us * ut * k_phi_[i] * k_psi_[j];
    }
  }
  return sum * hs * ht;
}

double SecondVariation::general(const TestFunction& u) const {
  const auto ns = static_cast<std::ptrdiff_t>(grid_.ns), nt = static_cast<std::ptrdiff_t>(grid_.nt);
  const double hs = grid_.hs, ht = grid_.ht;
  auto geo = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> const NodeGeometry& {
    i = std::clamp<std::ptrdiff_t>(i, 0, ns - 1);
    j = std::clamp<std::ptrdiff_t>(j, 0, nt - 1);
    return geometry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  auto touches_support = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    for (std::ptrdiff_t a = -1; a <= 1; ++a)
      for (std::ptrdiff_t b = -1; b <= 1; ++b)
        if (u.at(i + a, j + b) != 0.0) return true;
    return false;
  };
  auto u_s = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * hs); };
  auto u_t = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * ht); };

  double sum = 0.0;
  for (std::ptrdiff_t i = 0; i < ns; ++i) {
    for (std::ptrdiff_t j = 0; j < nt; ++j) {
      if (!touches_support(i, j)) continue;
      const NodeGeometry& n = geo(i, j);
      if (!n.valid) throw DegenerateError("degenerate induced metric inside the test function support");

      // Laplace-Beltrami: conservative half-node fluxes for the diagonal terms, central
      // differences for the mixed ones.
      auto flux_s = [&](std::ptrdiff_t a) {
        const double coef = 0.5 * (geo(a, j).area * geo(a, j).inv_ss + geo(a + 1, j).area * geo(a + 1, j).inv_ss);
        return coef * (u.at(a + 1, j) - u.at(a, j)) / hs;
      };
      auto flux_t = [&](std::ptrdiff_t b) {
        const double coef = 0.5 * (geo(i, b).area * geo(i, b).inv_tt + geo(i, b + 1).area * geo(i, b + 1).inv_tt);
        return coef * (u.at(i, b + 1) - u.at(i, b)) / ht;
      };
      auto mixed_s = [&](std::ptrdiff_t a) {
        if (a < 0 || a >= ns) return 0.0;
        return geo(a, j).area * geo(a, j).inv_st * u_t(a, j);
      };
      auto mixed_t = [&](std::ptrdiff_t b) {
        if (b < 0 || b >= nt) return 0.0;
        return geo(i, b).area * geo(i, b).inv_st * u_s(i, b);
      };
      const double div = (flux_s(i) - flux_s(i - 1)) / hs + (flux_t(j) - flux_t(j - 1)) / ht +
                         (mixed_s(i + 1) - mixed_s(i - 1)) / (2.0 * hs) + (mixed_t(j + 1) - mixed_t(j - 1)) / (2.0 * ht);
      const double lap = div / n.area;

      const double ds = u_s(i, j), dt = u_t(i, j);
      // grad u = g^{ij} u_j d_i
      const double gs = n.inv_ss * ds + n.inv_st * dt;
      const double gt = n.inv_st * ds + n.inv_tt * dt;
      const double ric = n.ric_ss * gs * gs + 2.0 * n.ric_st * gs * gt + n.ric_tt * gt * gt;
      // h(d_k, grad u, grad u) for k = s, t
      const TriTensor& h = n.h;
      const double hs_uu = h.sss * gs * gs + 2.0 * h.sst * gs * gt + h.stt * gt * gt;
      const double ht_uu = h.sst * gs * gs + 2.0 * h.stt * gs * gt + h.ttt * gt * gt;
      const double h_term = n.alpha * hs_uu + n.beta * ht_uu;
      // G(2H, J grad u) = alpha^k (grad u)^m G_km
      const double hj = n.alpha * (n.g_ss * gs + n.g_st * gt) + n.beta * (n.g_st * gs + n.g_tt * gt);
      const double f = lap * lap - ric - 2.0 * h_term + hj * hj;
      sum += trapezoid_weight(static_cast<std::size_t>(i), grid_.ns) *
             trapezoid_weight(static_cast<std::size_t>(j), grid_.nt) * f * n.area;
    }
  }
  return sum * hs * ht;
}

double second_variation_rank_one(const Immersion& imm, const TestFunction& u) {
  return SecondVariation(imm, Formula::rank_one)(u);
}

double second_variation_general(const Immersion& imm, const TestFunction& u) {
  return SecondVariation(imm, Formula::general)(u);
}

CurvatureBoundReport curvature_bound_check(const Immersion& imm) {
  if (imm.kind() != ImmersionKind::rank_one) throw PreconditionError("curvature_bound_check needs a rank-one immersion");
  CurvatureBoundReport r;
  bool first = true;
  auto scan = [&](const Curve& c, const Surface2D& S, int factor) {
    for (const CurveSample& p : c.samples()) {
      const double m = S.gauss_curvature(p.point) + 2.0 * p.curvature * p.curvature;
      if (first || m > r.worst_margin) {
        r.worst_margin = m;
        r.worst_factor = factor;
        r.worst_arclength = p.s;
        first = false;
      }
    }
  };
  scan(imm.curve_s(), imm.product().sigma1(), 1);
  scan(imm.curve_t(), imm.product().sigma2(), 2);
  r.pass = r.worst_margin <= 0.0;
  return r;
}

const char* family_name(TestFamily f) noexcept {
  switch (f) {
    case TestFamily::separable_bumps: return "separable-bumps";
    case TestFamily::bump_cosine: return "bump-cosine";
    case TestFamily::smoothed_random: return "smoothed-random";
  }
  return "unknown";
}

const char* classification_name(Classification c) noexcept {
  switch (c) {
    case Classification::nonnegative: return "nonnegative";
    case Classification::nonpositive: return "nonpositive";
    case Classification::indefinite: return "indefinite";
    case Classification::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::optional<TestFamily> parse_family(const std::string& name) {
  for (TestFamily f : {TestFamily::separable_bumps, TestFamily::bump_cosine, TestFamily::smoothed_random}) {
    if (name == family_name(f)) return f;
  }
  return std::nullopt;
}

Classification classify(const std::vector<double>& values, double tol) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (values.empty() || scale == 0.0) return Classification::inconclusive;
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const bool negative = lo < -tol * scale;
  const bool positive = hi > tol * scale;
  if (negative && positive) return Classification::indefinite;
  if (negative) return Classification::nonpositive;
  return Classification::nonnegative;
}

namespace {

// Uniform in [0, 1) from the top 53 bits, so streams do not depend on the standard library.
class Uniform {
 public:
  Uniform(std::uint64_t seed, std::uint64_t index) : gen_(seed * 0x9E3779B97F4A7C15ULL + index) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 gen_;
};

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

struct Region {
  double s_lo, s_hi, t_lo, t_hi;
};

Region support_region(const Grid& g) { return {g.s(2), g.s(g.ns - 3), g.t(2), g.t(g.nt - 3)}; }

struct Window {
  double c, w;
};

Window random_window(Uniform& rng, double lo, double hi, double min_frac, double max_frac) {
  const double len = hi - lo;
  const double w = rng(min_frac, max_frac) * len;
  const double c = rng(lo + w, hi - w);
  return {c, w};
}

}  // namespace

TestFunction generate_test_function(const Grid& grid, const ProbeOptions& options, std::size_t index) {
  if (grid.ns < 7 || grid.nt < 7) throw PreconditionError("grid too small for compactly supported test functions");
  Uniform rng(options.seed, index);
  const Region r = support_region(grid);

  // Separable members are assembled from per-axis factors.
  auto axis = [](const Grid& g, bool along_s, auto&& f) {
    const std::size_t n = along_s ? g.ns : g.nt;
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f(along_s ? g.s(k) : g.t(k));
    return v;
  };
  auto assemble = [&](auto&& value) {
    std::vector<double> v(grid.ns * grid.nt, 0.0);
    for (std::size_t i = 2; i + 2 < grid.ns; ++i)
      for (std::size_t j = 2; j + 2 < grid.nt; ++j) v[i * grid.nt + j] = value(i, j);
    return TestFunction(grid.ns, grid.nt, std::move(v));
  };

  switch (options.family) {
    case TestFamily::separable_bumps: {
      const Window ws = random_window(rng, r.s_lo, r.s_hi, 0.1, 0.5);
      const Window wt = random_window(rng, r.t_lo, r.t_hi, 0.1, 0.5);
      const auto bs = axis(grid, true, [&](double s) { return bump((s - ws.c) / ws.w); });
      const auto bt = axis(grid, false, [&](double t) { return bump((t - wt.c) / wt.w); });
      return assemble([&](std::size_t i, std::size_t j) { return bs[i] * bt[j]; });
    }
    case TestFamily::bump_cosine: {
      // Wide envelopes, so that low frequencies are resolved by the window.
      const Window ws = random_window(rng, r.s_lo, r.s_hi, 0.4, 0.5);
      const Window wt = random_window(rng, r.t_lo, r.t_hi, 0.4, 0.5);
      const double count = static_cast<double>(std::max<std::size_t>(options.count, 1));
      const double omega = options.max_frequency * (static_cast<double>(index) + 0.5) / count;
      // Oscillate along s, along t, or along a random direction, in turn.
      double angle = 0.0;
      if (index % 3 == 1) angle = 0.5 * M_PI;
      if (index % 3 == 2) angle = rng(0.0, M_PI);
      const double phase = rng(0.0, 2.0 * M_PI);
      const double ks = omega * std::cos(angle), kt = omega * std::sin(angle);
      // cos(a + b) = cos a cos b - sin a sin b
      const auto bs = axis(grid, true, [&](double s) { return bump((s - ws.c) / ws.w); });
      const auto bt = axis(grid, false, [&](double t) { return bump((t - wt.c) / wt.w); });
      const auto cs = axis(grid, true, [&](double s) { return std::cos(ks * (s - ws.c) + phase); });
      const auto ss = axis(grid, true, [&](double s) { return std::sin(ks * (s - ws.c) + phase); });
      const auto ct = axis(grid, false, [&](double t) { return std::cos(kt * (t - wt.c)); });
      const auto st = axis(grid, false, [&](double t) { return std::sin(kt * (t - wt.c)); });
      return assemble([&](std::size_t i, std::size_t j) { return bs[i] * bt[j] * (cs[i] * ct[j] - ss[i] * st[j]); });
    }
    case TestFamily::smoothed_random: {
      std::vector<double> v(grid.ns * grid.nt, 0.0);
      for (double& x : v) x = rng(-1.0, 1.0);
      const auto ns = static_cast<std::ptrdiff_t>(grid.ns), nt = static_cast<std::ptrdiff_t>(grid.nt);
      for (int pass = 0; pass < options.smoothing_passes; ++pass) {
        std::vector<double> next(v.size(), 0.0);
        for (std::ptrdiff_t i = 0; i < ns; ++i) {
          for (std::ptrdiff_t j = 0; j < nt; ++j) {
            double acc = 0.0;
            for (std::ptrdiff_t a = -1; a <= 1; ++a)
              for (std::ptrdiff_t b = -1; b <= 1; ++b)
                if (i + a >= 0 && i + a < ns && j + b >= 0 && j + b < nt) acc += v[(i + a) * nt + (j + b)];
            next[i * nt + j] = acc / 9.0;
          }
        }
        v.swap(next);
      }
      const double cs = 0.5 * (r.s_lo + r.s_hi), ws = 0.5 * (r.s_hi - r.s_lo);
      const double ct = 0.5 * (r.t_lo + r.t_hi), wt = 0.5 * (r.t_hi - r.t_lo);
      const auto bs = axis(grid, true, [&](double s) { return bump((s - cs) / ws); });
      const auto bt = axis(grid, false, [&](double t) { return bump((t - ct) / wt); });
      return assemble([&](std::size_t i, std::size_t j) { return v[i * grid.nt + j] * bs[i] * bt[j]; });
    }
  }
  throw PreconditionError("unknown test-function family");
}

SecondVariationReport stability_probe(const Immersion& imm, const ProbeOptions& options) {
  if (options.count == 0) throw PreconditionError("stability_probe needs at least one test function");
  const Formula formula =
      options.formula.value_or(imm.kind() == ImmersionKind::rank_one ? Formula::rank_one : Formula::general);
  const SecondVariation form(imm, formula);

  SecondVariationReport r;
  r.family = options.family;
  r.seed = options.seed;
  r.tol = options.tol;
  r.step_s = imm.grid().hs;
  r.step_t = imm.grid().ht;
  r.count = options.count;
  r.values.reserve(options.count);
  for (std::size_t k = 0; k < options.count; ++k) {
    r.values.push_back(form(generate_test_function(imm.grid(), options, k)));
  }
  r.min = *std::min_element(r.values.begin(), r.values.end());
  r.max = *std::max_element(r.values.begin(), r.values.end());
  r.classification = classify(r.values, options.tol);

  const double scale = std::max(std::abs(r.min), std::abs(r.max));
  const auto hi = static_cast<std::size_t>(std::max_element(r.values.begin(), r.values.end()) - r.values.begin());
  const auto lo = static_cast<std::size_t>(std::min_element(r.values.begin(), r.values.end()) - r.values.begin());
  if (scale > 0.0 && r.max > options.tol * scale) {
    r.plus_index = hi;
    r.u_plus = generate_test_function(imm.grid(), options, hi);
  }
  if (scale > 0.0 && r.min < -options.tol * scale) {
    r.minus_index = lo;
    r.u_minus = generate_test_function(imm.grid(), options, lo);
  }
  return r;
}

std::string to_json(const SecondVariationReport& r) {
  nlohmann::ordered_json j;
  j["family"] = family_name(r.family);
  j["seed"] = r.seed;
  j["count"] = r.count;
  j["step_s"] = r.step_s;
  j["step_t"] = r.step_t;
  j["tol"] = r.tol;
  j["min"] = r.min;
  j["max"] = r.max;
  j["classification"] = classification_name(r.classification);
  auto cert = [&](const std::optional<std::size_t>& idx) -> nlohmann::ordered_json {
    if (!idx) return nullptr;
    return {{"index", *idx}, {"value", r.values[*idx]}};
  };
  j["certificate_plus"] = cert(r.plus_index);
  j["certificate_minus"] = cert(r.minus_index);
  j["values"] = r.values;
  return j.dump(2);
}

void write_csv(std::ostream& os, const SecondVariationReport& r) {
  os << "id,value\n";
  char line[64];
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    std::snprintf(line, sizeof line, "%zu,%.17g\n", k, r.values[k]);
    os << line;
  }
}

}  // namespace kahler
