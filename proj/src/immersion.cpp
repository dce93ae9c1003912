#include "kahler/immersion.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace kahler {

const char* kind_name(ImmersionKind k) noexcept {
  switch (k) {
    case ImmersionKind::rank_one: return "rank-one";
    case ImmersionKind::graph: return "graph";
    case ImmersionKind::general: return "general";
  }
  return "unknown";
}

Immersion::Immersion(std::shared_ptr<const KahlerProduct> product, Grid grid, ImmersionKind kind,
                     std::vector<NodeJet> jets, std::optional<std::pair<Curve, Curve>> curves)
    : product_(std::move(product)), grid_(grid), kind_(kind), jets_(std::move(jets)), curves_(std::move(curves)) {
  if (!product_) throw PreconditionError("immersion needs a product");
  if (grid_.ns < 3 || grid_.nt < 3) throw PreconditionError("immersion grid needs at least 3x3 nodes");
  if (!(grid_.hs > 0.0) || !(grid_.ht > 0.0)) throw PreconditionError("grid steps must be positive");
  if (jets_.size() != grid_.ns * grid_.nt) throw PreconditionError("jet count does not match grid");
  if (kind_ == ImmersionKind::rank_one && !curves_) throw PreconditionError("rank-one immersion needs its curves");
}

bool Immersion::interior(NodeIndex n, std::size_t margin) const {
  return n.i >= margin && n.j >= margin && n.i + margin < grid_.ns && n.j + margin < grid_.nt;
}

std::vector<NodeIndex> Immersion::interior_nodes(std::size_t margin) const {
  std::vector<NodeIndex> out;
  for (std::size_t i = margin; i + margin < grid_.ns; ++i)
    for (std::size_t j = margin; j + margin < grid_.nt; ++j) out.push_back({i, j});
  return out;
}

const Curve& Immersion::curve_s() const {
  if (!curves_) throw PreconditionError("immersion is not rank-one");
  return curves_->first;
}

const Curve& Immersion::curve_t() const {
  if (!curves_) throw PreconditionError("immersion is not rank-one");
  return curves_->second;
}

namespace {

void require_unit_speed(const Curve& c, const char* which) {
  const Surface2D& S = c.surface();
  for (const CurveSample& p : c.samples()) {
    const double speed = std::sqrt(S.metric(p.point, p.tangent, p.tangent));
    if (std::abs(speed - 1.0) > 1e-6) {
      throw PreconditionError(std::string(which) + " curve is not unit speed at arclength " + std::to_string(p.s));
    }
  }
}

// Derivative of the tangent field along a sampled curve, central in the interior.
Vec2 tangent_derivative(const Curve& c, std::size_t i) {
  const double h = c.step();
  if (i == 0) return (c[1].tangent - c[0].tangent) / h;
  if (i + 1 == c.size()) return (c[i].tangent - c[i - 1].tangent) / h;
  return (c[i + 1].tangent - c[i - 1].tangent) / (2.0 * h);
}

}  // namespace

Immersion build_rank_one(std::shared_ptr<const KahlerProduct> product, const Curve& c1, const Curve& c2) {
  if (!product) throw PreconditionError("build_rank_one: null product");
  if (c1.surface_ptr() != product->sigma1_ptr() || c2.surface_ptr() != product->sigma2_ptr())
    throw PreconditionError("build_rank_one: curves must lie on the product's factors, in order");
  require_unit_speed(c1, "first");
  require_unit_speed(c2, "second");
  Grid grid{c1[0].s, c2[0].s, c1.step(), c2.step(), c1.size(), c2.size()};
  std::vector<NodeJet> jets;
  jets.reserve(grid.ns * grid.nt);
  for (std::size_t i = 0; i < grid.ns; ++i) {
    const Vec2 acc1 = tangent_derivative(c1, i);
    for (std::size_t j = 0; j < grid.nt; ++j) {
      const ProductPoint p{c1[i].point, c2[j].point};
      const Vec2 acc2 = tangent_derivative(c2, j);
      NodeJet jet;
      jet.point = p;
      jet.ds = {p, c1[i].tangent, {}};
      jet.dt = {p, {}, c2[j].tangent};
      jet.dss = {p, acc1, {}};
      jet.dst = {p, {}, {}};
      jet.dtt = {p, {}, acc2};
      jets.push_back(jet);
    }
  }
  return Immersion(std::move(product), grid, ImmersionKind::rank_one, std::move(jets), std::make_pair(c1, c2));
}

namespace {

// Fourth-order central differences of an analytic map at a node. The internal step is
// independent of the grid so that node jets are accurate to roughly 1e-10.
constexpr double kJetStep = 1e-3;

struct MapJet {
  Point2 v;
  Vec2 ds, dt, dss, dst, dtt;
};

MapJet map_jet(const ChartMap& f, Point2 q) {
  const double d = kJetStep;
  auto at = [&](double a, double b) { return f({q.x + a * d, q.y + b * d}); };
  MapJet m;
  m.v = f(q);
  const Point2 sp1 = at(1, 0), sm1 = at(-1, 0), sp2 = at(2, 0), sm2 = at(-2, 0);
  const Point2 tp1 = at(0, 1), tm1 = at(0, -1), tp2 = at(0, 2), tm2 = at(0, -2);
  m.ds = (8.0 * (sp1 - sm1) - (sp2 - sm2)) / (12.0 * d);
  m.dt = (8.0 * (tp1 - tm1) - (tp2 - tm2)) / (12.0 * d);
  m.dss = (16.0 * (sp1 + sm1) - (sp2 + sm2) - 30.0 * m.v) / (12.0 * d * d);
  m.dtt = (16.0 * (tp1 + tm1) - (tp2 + tm2) - 30.0 * m.v) / (12.0 * d * d);
  auto cross_diff = [&](double a) { return at(a, a) - at(a, -a) - at(-a, a) + at(-a, -a); };
  m.dst = (16.0 * cross_diff(1) - cross_diff(2)) / (48.0 * d * d);
  return m;
}

}  // namespace

Immersion build_map(std::shared_ptr<const KahlerProduct> product, Grid grid, ChartMap phi, ChartMap psi,
                    ImmersionKind kind) {
  if (!product) throw PreconditionError("build_map: null product");
  if (kind == ImmersionKind::rank_one) throw PreconditionError("use build_rank_one for rank-one immersions");
  std::vector<NodeJet> jets;
  jets.reserve(grid.ns * grid.nt);
  for (std::size_t i = 0; i < grid.ns; ++i) {
    for (std::size_t j = 0; j < grid.nt; ++j) {
      const Point2 q{grid.s(i), grid.t(j)};
      const MapJet a = map_jet(phi, q), b = map_jet(psi, q);
      const ProductPoint p{a.v, b.v};
      if (!product->contains(p)) {
        throw DomainError("immersion node (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") maps outside the product chart");
      }
      jets.push_back({p, {p, a.ds, b.ds}, {p, a.dt, b.dt}, {p, a.dss, b.dss}, {p, a.dst, b.dst}, {p, a.dtt, b.dtt}});
    }
  }
  return Immersion(std::move(product), grid, kind, std::move(jets));
}

Immersion build_graph(std::shared_ptr<const KahlerProduct> product, Grid grid, ChartMap f) {
  return build_map(std::move(product), grid, [](Point2 q) { return q; }, std::move(f), ImmersionKind::graph);
}

ChartMap darboux_graph_map(const KahlerProduct& product, ChartMap planar) {
  const auto& d1 = product.sigma1().darboux();
  const auto& d2 = product.sigma2().darboux();
  if (!d1 || !d2) throw PreconditionError("darboux_graph_map: both factors need a Darboux chart");
  return [to = d1->to_plane, from = d2->from_plane, g = std::move(planar)](Point2 q) { return from(g(to(q))); };
}

double reference_norm(const KahlerProduct& K, const ProductVec& X) {
  return std::sqrt(K.sigma1().metric(X.base.p1, X.x1, X.x1) + K.sigma2().metric(X.base.p2, X.x2, X.x2));
}

namespace {

int chart_rank(Vec2 a, Vec2 b) {
  Eigen::Matrix2d m;
  m << a.x, b.x, a.y, b.y;
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues();
  const double cutoff = std::max(1e-8 * sv(0), 1e-12);
  return (sv(0) > cutoff ? 1 : 0) + (sv(1) > cutoff ? 1 : 0);
}

void require_lagrangian(const Immersion& imm, NodeIndex n, double tol) {
  const KahlerProduct& K = imm.product();
  const NodeJet& jet = imm.jet(n);
  const double w = std::abs(K.omega(jet.ds, jet.dt));
  const double scale = reference_norm(K, jet.ds) * reference_norm(K, jet.dt);
  if (w > tol * std::max(scale, 1e-300)) {
    throw PreconditionError("node (" + std::to_string(n.i) + ", " + std::to_string(n.j) +
                            ") is not Lagrangian: |Omega(Phi_s, Phi_t)| = " + std::to_string(w));
  }
}

void require_node(const Immersion& imm, NodeIndex n, std::size_t margin, const char* op) {
  if (!imm.interior(n, margin)) throw PreconditionError(std::string(op) + ": node is too close to the grid boundary");
}

}  // namespace

int projected_rank(const Immersion& imm, NodeIndex n) {
  const NodeJet& jet = imm.jet(n);
  const int r1 = chart_rank(jet.ds.x1, jet.dt.x1);
  const int r2 = chart_rank(jet.ds.x2, jet.dt.x2);
  if (r1 == 2 && r2 == 2) return 2;
  if (r1 == 1 || r2 == 1) return 1;
  return 0;
}

NodeResidual lagrangian_residual(const Immersion& imm) {
  const KahlerProduct& K = imm.product();
  NodeResidual r{-1.0, {}};
  for (NodeIndex n : imm.interior_nodes()) {
    const double w = std::abs(K.omega(imm.jet(n).ds, imm.jet(n).dt));
    if (w > r.max_residual) r = {w, n};
  }
  return r;
}

InducedMetric induced_metric(const Immersion& imm, NodeIndex n) {
  const KahlerProduct& K = imm.product();
  const NodeJet& jet = imm.jet(n);
  const double rss = std::pow(reference_norm(K, jet.ds), 2), rtt = std::pow(reference_norm(K, jet.dt), 2);
  const double rst = K.sigma1().metric(jet.point.p1, jet.ds.x1, jet.dt.x1) +
                     K.sigma2().metric(jet.point.p2, jet.ds.x2, jet.dt.x2);
  if (std::abs(rss * rtt - rst * rst) < 1e-12) {
    throw DegenerateError("degenerate tangent plane at node (" + std::to_string(n.i) + ", " + std::to_string(n.j) + ")");
  }
  return {K.metric(jet.ds, jet.ds), K.metric(jet.ds, jet.dt), K.metric(jet.dt, jet.dt)};
}

double TriTensor::max_abs() const { return std::max({std::abs(sss), std::abs(sst), std::abs(stt), std::abs(ttt)}); }

TriTensor second_fundamental(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  require_lagrangian(imm, n, lagrangian_tol);
  const KahlerProduct& K = imm.product();
  const NodeJet& jet = imm.jet(n);
  const ProductVec nss = jet.dss + K.christoffel(jet.ds, jet.ds);
  const ProductVec nst = jet.dst + K.christoffel(jet.ds, jet.dt);
  const ProductVec ntt = jet.dtt + K.christoffel(jet.dt, jet.dt);
  return {K.omega(jet.ds, nss), K.omega(jet.ds, nst), K.omega(jet.ds, ntt), K.omega(jet.dt, ntt)};
}

ProductVec mean_curvature(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  const InducedMetric g = induced_metric(imm, n);
  const TriTensor h = second_fundamental(imm, n, lagrangian_tol);
  const double det = g.det();
  if (std::abs(det) < 1e-12) throw DegenerateError("degenerate induced metric");
  // G(2H, J Phi_s) and G(2H, J Phi_t) as traces of h.
  const double cs = (h.sss * g.tt + h.stt * g.ss - 2.0 * h.sst * g.st) / det;
  const double ct = (h.sst * g.tt + h.ttt * g.ss - 2.0 * h.stt * g.st) / det;
  // 2H = alpha J Phi_s + beta J Phi_t, and G(J X, J Y) = G(X, Y).
  const double alpha = (cs * g.tt - ct * g.st) / det;
  const double beta = (ct * g.ss - cs * g.st) / det;
  const KahlerProduct& K = imm.product();
  const NodeJet& jet = imm.jet(n);
  return 0.5 * (alpha * K.apply_J(jet.ds) + beta * K.apply_J(jet.dt));
}

NodeResidual hamiltonian_residual(const Immersion& imm) {
  if (imm.kind() != ImmersionKind::rank_one) throw PreconditionError("hamiltonian_residual needs a rank-one immersion");
  const Curve& c1 = imm.curve_s();
  const Curve& c2 = imm.curve_t();
  const int eps = imm.product().eps();
  NodeResidual r;
  bool first = true;
  for (std::size_t i = 1; i + 1 < c1.size(); ++i) {
    const double dk1 = (c1[i + 1].curvature - c1[i - 1].curvature) / (2.0 * c1.step());
    for (std::size_t j = 1; j + 1 < c2.size(); ++j) {
      const double dk2 = (c2[j + 1].curvature - c2[j - 1].curvature) / (2.0 * c2.step());
      const double v = std::abs(dk1 + eps * dk2);
      if (first || v > r.max_residual) r = {v, {i, j}};
      first = false;
    }
  }
  return r;
}

MaslovTerms maslov_terms(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  require_node(imm, n, 2, "maslov_defect");
  const KahlerProduct& K = imm.product();
  // a_H(d_k) = G(J H, Phi_k)
  auto a_h = [&](NodeIndex m, bool along_t) {
    const NodeJet& jet = imm.jet(m);
    const ProductVec jh = K.apply_J(mean_curvature(imm, m, lagrangian_tol));
    return K.metric(jh, along_t ? jet.dt : jet.ds);
  };
  const Grid& g = imm.grid();
  const double dsat = (a_h({n.i + 1, n.j}, true) - a_h({n.i - 1, n.j}, true)) / (2.0 * g.hs);
  const double dtas = (a_h({n.i, n.j + 1}, false) - a_h({n.i, n.j - 1}, false)) / (2.0 * g.ht);
  const NodeJet& jet = imm.jet(n);
  const double rho = K.ricci_form(jet.ds, jet.dt);
  return {dsat - dtas, rho};
}

double maslov_defect(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  const MaslovTerms m = maslov_terms(imm, n, lagrangian_tol);
  return std::abs(m.da_h - m.rho);
}

double LagrangianFrameCoefficients::identity_residual(int eps) const {
  const double e = eps;
  return std::max({std::abs(a * b - a_bar * b_bar), std::abs(a + e * a_bar - 1.0), std::abs(e * b + b_bar - 1.0),
                   std::abs(a + e * b - 1.0), std::abs(a_bar + e * b_bar - e)});
}

namespace {

struct TangentFrame {
  ProductVec e1, e2;
};

// Gram-Schmidt under G with |e1|^2 = 1 and |e2|^2 = eps.
TangentFrame orthonormal_tangent_frame(const Immersion& imm, NodeIndex n) {
  const KahlerProduct& K = imm.product();
  const NodeJet& jet = imm.jet(n);
  const double null_tol = 1e-8;
  ProductVec d = jet.ds, o = jet.dt;
  if (std::abs(K.metric(o, o)) > std::abs(K.metric(d, d))) std::swap(d, o);
  const double dd = K.metric(d, d);
  const double ref_d = std::pow(reference_norm(K, d), 2), ref_o = std::pow(reference_norm(K, o), 2);
  if (std::abs(dd) <= null_tol * ref_d) throw DegenerateError("null tangent direction in Gram-Schmidt");
  const ProductVec u = (1.0 / std::sqrt(std::abs(dd))) * d;
  const double uu = dd > 0.0 ? 1.0 : -1.0;
  const ProductVec w = o - (K.metric(o, u) / uu) * u;
  const double ww = K.metric(w, w);
  if (std::abs(ww) <= null_tol * ref_o) throw DegenerateError("null tangent direction in Gram-Schmidt");
  const ProductVec v = (1.0 / std::sqrt(std::abs(ww))) * w;
  const double vv = ww > 0.0 ? 1.0 : -1.0;
  const double eps = K.eps();
  if (uu > 0.0 && vv == eps) return {u, v};
  if (vv > 0.0 && uu == eps) return {v, u};
  throw DegenerateError("tangent plane has the wrong signature for a Lagrangian frame");
}

}  // namespace

LagrangianFrameCoefficients frame_coefficients(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  if (projected_rank(imm, n) != 2) throw DegenerateError("frame_coefficients needs projected rank two");
  require_lagrangian(imm, n, lagrangian_tol);
  const KahlerProduct& K = imm.product();
  const TangentFrame f = orthonormal_tangent_frame(imm, n);
  // Components in the oriented g-orthonormal chart frames (s1, s2 = j s1) scale by sqrt(lambda).
  const double r1 = std::sqrt(K.sigma1().lambda(f.e1.base.p1));
  const double r2 = std::sqrt(K.sigma2().lambda(f.e1.base.p2));
  LagrangianFrameCoefficients c{};
  c.lambda1 = r1 * f.e1.x1.x;
  c.lambda2 = r1 * f.e1.x1.y;
  c.mu1 = r1 * f.e2.x1.x;
  c.mu2 = r1 * f.e2.x1.y;
  c.lambda1_bar = r2 * f.e1.x2.x;
  c.lambda2_bar = r2 * f.e1.x2.y;
  c.mu1_bar = r2 * f.e2.x2.x;
  c.mu2_bar = r2 * f.e2.x2.y;
  c.a = c.lambda1 * c.lambda1 + c.lambda2 * c.lambda2;
  c.b = c.mu1 * c.mu1 + c.mu2 * c.mu2;
  c.a_bar = c.lambda1_bar * c.lambda1_bar + c.lambda2_bar * c.lambda2_bar;
  c.b_bar = c.mu1_bar * c.mu1_bar + c.mu2_bar * c.mu2_bar;
  return c;
}

double rank_two_constraint_residual(const Immersion& imm, NodeIndex n, double lagrangian_tol) {
  frame_coefficients(imm, n, lagrangian_tol);
  const KahlerProduct& K = imm.product();
  const ProductPoint& p = imm.point(n);
  return std::abs(K.sigma1().gauss_curvature(p.p1) - K.eps() * K.sigma2().gauss_curvature(p.p2));
}

void write_csv(std::ostream& os, const Immersion& imm) {
  os << "s,t,x1,y1,x2,y2\n";
  const Grid& g = imm.grid();
  char line[256];
  for (std::size_t i = 0; i < g.ns; ++i) {
    for (std::size_t j = 0; j < g.nt; ++j) {
      const ProductPoint& p = imm.point({i, j});
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.s(i), g.t(j), p.p1.x, p.p1.y,
                    p.p2.x, p.p2.y);
      os << line;
    }
  }
}

}  // namespace kahler
