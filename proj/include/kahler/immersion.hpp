#pragma once

// Discretized surfaces (s, t) -> (phi(s, t), psi(s, t)) in a product Kahler 4-manifold.
//
// Every node carries a jet (Phi, Phi_s, Phi_t, Phi_ss, Phi_st, Phi_tt) in chart components.
// Rank-one immersions built from two curves take Phi_s, Phi_t from the curves' unit tangents
// and the second derivatives from central differences of those tangents along the grid.
// Map-based immersions (graphs, general maps) take the jet from central differences of the
// analytic map at each node with a fixed internal step. Quantities built from neighbouring
// nodes (the Maslov form derivative) always use grid central differences.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "kahler/curve.hpp"
#include "kahler/product.hpp"

namespace kahler {

struct Grid {
  double s0 = 0.0, t0 = 0.0;
  double hs = 1e-2, ht = 1e-2;
  std::size_t ns = 0, nt = 0;

  double s(std::size_t i) const { return s0 + static_cast<double>(i) * hs; }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * ht; }
};

struct NodeIndex {
  std::size_t i = 0, j = 0;
  friend bool operator==(NodeIndex, NodeIndex) = default;
};

enum class ImmersionKind { rank_one, graph, general };

const char* kind_name(ImmersionKind k) noexcept;

struct NodeJet {
  ProductPoint point;
  ProductVec ds, dt, dss, dst, dtt;
};

using ChartMap = std::function<Point2(Point2)>;

class Immersion {
 public:
  Immersion(std::shared_ptr<const KahlerProduct> product, Grid grid, ImmersionKind kind, std::vector<NodeJet> jets,
            std::optional<std::pair<Curve, Curve>> curves = std::nullopt);

  const KahlerProduct& product() const { return *product_; }
  const std::shared_ptr<const KahlerProduct>& product_ptr() const { return product_; }
  const Grid& grid() const { return grid_; }
  ImmersionKind kind() const { return kind_; }

  const NodeJet& jet(NodeIndex n) const { return jets_[n.i * grid_.nt + n.j]; }
  const ProductPoint& point(NodeIndex n) const { return jet(n).point; }

  // Nodes at least `margin` steps away from every edge of the grid.
  bool interior(NodeIndex n, std::size_t margin = 1) const;
  std::vector<NodeIndex> interior_nodes(std::size_t margin = 1) const;

  // Rank-one only: the generating curves, indexed like the grid axes.
  const Curve& curve_s() const;
  const Curve& curve_t() const;

 private:
  std::shared_ptr<const KahlerProduct> product_;
  Grid grid_;
  ImmersionKind kind_;
  std::vector<NodeJet> jets_;
  std::optional<std::pair<Curve, Curve>> curves_;
};

// Phi(s, t) = (c1(s), c2(t)). Both curves must be unit speed.
Immersion build_rank_one(std::shared_ptr<const KahlerProduct> product, const Curve& c1, const Curve& c2);

// Phi(s, t) = ((s, t), f(s, t)).
Immersion build_graph(std::shared_ptr<const KahlerProduct> product, Grid grid, ChartMap f);

// Phi(s, t) = (phi(s, t), psi(s, t)).
Immersion build_map(std::shared_ptr<const KahlerProduct> product, Grid grid, ChartMap phi, ChartMap psi,
                    ImmersionKind kind = ImmersionKind::general);

// Chart map f = D2^-1 o g o D1 built from the Darboux charts of both factors. The graph of f
// is Lagrangian exactly when g scales area by -eps.
ChartMap darboux_graph_map(const KahlerProduct& product, ChartMap planar);

struct NodeResidual {
  double max_residual = 0.0;
  NodeIndex node_of_max{};
};

int projected_rank(const Immersion& imm, NodeIndex n);

// max over interior nodes of |Omega(Phi_s, Phi_t)|.
NodeResidual lagrangian_residual(const Immersion& imm);

struct InducedMetric {
  double ss, st, tt;
  double det() const { return ss * tt - st * st; }
};

// Throws DegenerateError when the reference (Riemannian) Gram determinant is below 1e-12.
InducedMetric induced_metric(const Immersion& imm, NodeIndex n);

struct TriTensor {
  double sss, sst, stt, ttt;
  double max_abs() const;
};

// h(d_i, d_j, d_k) = Omega(d_i Phi, grad_{d_j} d_k Phi). Requires a Lagrangian node:
// |Omega(Phi_s, Phi_t)| <= lagrangian_tol times the reference norms of Phi_s and Phi_t.
TriTensor second_fundamental(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

// Mean curvature vector H with 2H = trace of the second fundamental form.
ProductVec mean_curvature(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

// Rank-one only: max over interior nodes of |dk_phi/ds + eps dk_psi/dt|.
NodeResidual hamiltonian_residual(const Immersion& imm);

// |d a_H(d_s, d_t) - rho(Phi_s, Phi_t)| with a_H = G(JH, .) and rho the Ricci form.
// Requires a node two steps from every edge.
double maslov_defect(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

struct MaslovTerms {
  double da_h;
  double rho;
};
MaslovTerms maslov_terms(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

struct LagrangianFrameCoefficients {
  double lambda1, lambda2, mu1, mu2;
  double lambda1_bar, lambda2_bar, mu1_bar, mu2_bar;
  double a, b, a_bar, b_bar;

  // Largest violation among ab = a'b', a + eps a' = 1, eps b + b' = 1, a + eps b = 1,
  // a' + eps b' = eps.
  double identity_residual(int eps) const;
};

// Decomposes d phi(e_k), d psi(e_k) for a G-orthonormal tangent frame with |e1|^2 = 1,
// |e2|^2 = eps. Requires projected rank two and a Lagrangian node.
LagrangianFrameCoefficients frame_coefficients(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

// |kappa1(phi) - eps kappa2(psi)| at a valid rank-two Lagrangian node.
double rank_two_constraint_residual(const Immersion& imm, NodeIndex n, double lagrangian_tol = 1e-6);

// Riemannian reference norm sqrt(g1(X1, X1) + g2(X2, X2)).
double reference_norm(const KahlerProduct& K, const ProductVec& X);

// CSV rows: s,t,x1,y1,x2,y2.
void write_csv(std::ostream& os, const Immersion& imm);

}  // namespace kahler
