#pragma once

// Second variation of volume along Hamiltonian deformations X = J grad u of a Lagrangian
// surface:
//
//   d2V(u) = int (Lap u)^2 - Ric(grad u, grad u) - 2 G(h(grad u, grad u), 2H) + G(2H, J grad u)^2 dA
//
// with 2H the trace of the second fundamental form. For a rank-one surface built from unit
// speed curves with curvatures k_phi, k_psi this reduces to
//
//   int (u_ss + eps u_tt)^2 + u_s^2 (-kappa1 - k_phi^2) + u_t^2 (-kappa2 - k_psi^2)
//       + 2 eps u_s u_t k_phi k_psi ds dt.
//
// Derivatives of u are central differences on the immersion grid, u is zero outside the grid,
// and both integrals use the trapezoid rule.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kahler/immersion.hpp"

namespace kahler {

class TestFunction {
 public:
  // Values are row-major, index i * nt + j.
  TestFunction(std::size_t ns, std::size_t nt, std::vector<double> values);

  // Samples f at the grid nodes and clears the two-node boundary collar.
  static TestFunction sample(const Grid& grid, const std::function<double(double, double)>& f);
  static TestFunction zero(const Grid& grid);

  std::size_t ns() const { return ns_; }
  std::size_t nt() const { return nt_; }
  const std::vector<double>& values() const { return values_; }

  // Value at (i, j); zero for indices outside the grid.
  double at(std::ptrdiff_t i, std::ptrdiff_t j) const;

  // True when every node of the two-node collar is exactly zero.
  bool compact_support() const;

  TestFunction scaled(double c) const;

 private:
  std::size_t ns_, nt_;
  std::vector<double> values_;
};

enum class Formula { rank_one, general };

// Evaluator with the immersion geometry precomputed once per node.
class SecondVariation {
 public:
  SecondVariation(const Immersion& imm, Formula formula);

  double operator()(const TestFunction& u) const;
  Formula formula() const { return formula_; }

 private:
  struct NodeGeometry {
    bool valid = false;
    double g_ss = 0, g_st = 0, g_tt = 0;
    double inv_ss = 0, inv_st = 0, inv_tt = 0;
    double area = 0;  // sqrt |det g|
    double ric_ss = 0, ric_st = 0, ric_tt = 0;
    TriTensor h{};
    double alpha = 0, beta = 0;  // 2H = alpha J Phi_s + beta J Phi_t
  };

  double rank_one(const TestFunction& u) const;
  double general(const TestFunction& u) const;
  const NodeGeometry& geometry(std::size_t i, std::size_t j) const { return nodes_[i * grid_.nt + j]; }

  Formula formula_;
  Grid grid_;
  int eps_;
  // rank-one data per axis
  std::vector<double> kappa1_, kappa2_, k_phi_, k_psi_;
  std::vector<NodeGeometry> nodes_;
  std::string degenerate_;
};

double second_variation_rank_one(const Immersion& imm, const TestFunction& u);
double second_variation_general(const Immersion& imm, const TestFunction& u);

struct CurvatureBoundReport {
  bool pass = false;
  // max over samples and both factors of kappa + 2 k^2; the bound holds when this is <= 0.
  double worst_margin = 0.0;
  int worst_factor = 1;
  double worst_arclength = 0.0;
};

// Checks kappa(g1) <= -2 k_phi^2 and kappa(g2) <= -2 k_psi^2 at every curve sample.
CurvatureBoundReport curvature_bound_check(const Immersion& imm);

enum class TestFamily { separable_bumps, bump_cosine, smoothed_random };
enum class Classification { nonnegative, nonpositive, indefinite, inconclusive };

const char* family_name(TestFamily f) noexcept;
const char* classification_name(Classification c) noexcept;
std::optional<TestFamily> parse_family(const std::string& name);

struct ProbeOptions {
  TestFamily family = TestFamily::separable_bumps;
  std::size_t count = 200;
  std::uint64_t seed = 1;
  int smoothing_passes = 4;
  double tol = 1e-8;
  // Top of the frequency sweep for the oscillating family, in radians per unit length.
  double max_frequency = 4.0;
  std::optional<Formula> formula;  // default: rank-one formula on rank-one immersions
};

struct SecondVariationReport {
  std::vector<double> values;
  double min = 0.0, max = 0.0;
  Classification classification = Classification::inconclusive;
  double step_s = 0.0, step_t = 0.0;
  std::size_t count = 0;
  TestFamily family = TestFamily::separable_bumps;
  std::uint64_t seed = 0;
  double tol = 0.0;
  // Certificates: a test function with d2V > tol scale and one with d2V < -tol scale.
  std::optional<std::size_t> plus_index, minus_index;
  std::optional<TestFunction> u_plus, u_minus;
};

Classification classify(const std::vector<double>& values, double tol);

// Deterministic family member `index` of a seeded family on the immersion grid.
TestFunction generate_test_function(const Grid& grid, const ProbeOptions& options, std::size_t index);

SecondVariationReport stability_probe(const Immersion& imm, const ProbeOptions& options);

std::string to_json(const SecondVariationReport& report);
// CSV rows: id,value.
void write_csv(std::ostream& os, const SecondVariationReport& report);

}  // namespace kahler
