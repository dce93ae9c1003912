#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kahler/config.hpp"
#include "kahler/suites.hpp"
#include "support.hpp"

using namespace kahler;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "name": "mini",
    "surfaces": {
      "S2": {"lambda": "4/(1+x^2+y^2)^2", "domain": {"type": "disk", "center": [0, 0], "radius": 1000},
             "model": {"type": "sphere", "curvature": 1}, "anchor": [0.3, 0.2], "sample_box": [-1, 1, -1, 1]},
      "H2": {"lambda": "4/(1-x^2-y^2)^2", "domain": {"type": "disk", "center": [0, 0], "radius": 1},
             "model": {"type": "hyperbolic", "magnitude": 1}, "anchor": [0.2, 0.1], "sample_box": [-0.5, 0.5, -0.5, 0.5]}
    },
    "product": {"sigma1": "S2", "sigma2": "H2", "eps": 1},
    "curves": {
      "a": {"surface": "S2", "start": [0.3, 0.2], "angle": 0.3, "curvature_profile": "0", "length": 0.05, "step": 0.001},
      "b": {"surface": "H2", "start": [0.2, 0.1], "angle": 1.0, "curvature_profile": "0", "length": 0.05, "step": 0.001}
    },
    "immersions": {
      "geodesics": {"kind": "rank-one", "curves": ["a", "b"]},
      "lag": {"kind": "graph", "darboux_map": ["y + 0.2*x^2", "x"],
              "grid": {"s0": 0.29, "t0": 0.19, "step": 0.001, "ns": 21, "nt": 21}}
    },
    "suites": {"scalar-curvature": {"samples": 20, "seed": 5, "expected": 0}}
  })");
}

void expect_config_error(json j, const std::string& fragment) {
  try {
    Config::from_json(j);
    FAIL("accepted an invalid configuration, expected: " << fragment);
  } catch (const ConfigError& e) {
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_CASE("a valid configuration builds") {
  const Config c = Config::from_json(minimal());
  CHECK(c.name() == "mini");
  CHECK(c.product()->eps() == 1);
  CHECK(c.sigma1_name() == "S2");
  CHECK(c.curve("a").size() == 51);
  CHECK(c.immersion_names() == std::vector<std::string>{"geodesics", "lag"});
  CHECK(c.immersion_kind("geodesics") == "rank-one");
  const Immersion lag = c.immersion("lag");
  CHECK(lagrangian_residual(lag).max_residual < 1e-9);
  const Immersion coarse = c.immersion("lag", 0.002);
  CHECK(coarse.grid().ns == 11);
  CHECK(coarse.grid().hs == doctest::Approx(0.002));
  CHECK(c.suite_params("scalar-curvature").at("seed") == 5);
  CHECK(c.suite_params("maslov").empty());
  CHECK_THROWS_AS(c.curve("zz"), ConfigError);
  CHECK_THROWS_AS(c.immersion("zz"), ConfigError);
}

TEST_CASE("configuration validation") {
  json j = minimal();
  j["product"]["eps"] = 2;
  expect_config_error(j, "product.eps");
  j = minimal();
  j["product"]["sigma2"] = "T2";
  expect_config_error(j, "unknown surface");
  j = minimal();
  j["surfaces"]["S2"]["lambda"] = "4/(1+x^2+y^2";
  expect_config_error(j, "surfaces.S2.lambda");
  j = minimal();
  j["surfaces"]["S2"]["lambda"] = "1";
  expect_config_error(j, "does not match the model");
  j = minimal();
  j["surfaces"]["H2"]["anchor"] = {2, 0};
  expect_config_error(j, "outside the chart domain");
  j = minimal();
  j["surfaces"]["S2"]["domain"]["type"] = "torus";
  expect_config_error(j, "unknown domain type");
  j = minimal();
  j["curves"]["a"]["length"] = -1;
  expect_config_error(j, "must be positive");
  j = minimal();
  j["curves"]["a"]["curvature_profile"] = "x";
  expect_config_error(j, "may only use s");
  j = minimal();
  j["curves"]["b"]["length"] = 5;
  j["curves"]["b"]["start"] = {0.9, 0};
  j["curves"]["b"]["angle"] = 0;
  j["surfaces"]["H2"]["domain"] = {{"type", "rect"}, {"bounds", {-0.95, 0.95, -0.95, 0.95}}};
  j["surfaces"]["H2"].erase("model");
  j["immersions"].erase("lag");
  expect_config_error(j, "curves.b");
  j = minimal();
  j["immersions"]["geodesics"]["curves"] = {"b", "a"};
  expect_config_error(j, "immersions.geodesics");
  j = minimal();
  j["immersions"]["lag"]["map"] = {"x", "y"};
  expect_config_error(j, "immersions.lag");
  j = minimal();
  j["immersions"]["lag"]["darboux_map"] = {"s", "x"};
  expect_config_error(j, "only use x and y");
  j = minimal();
  j["surfaces"]["H2"].erase("model");
  expect_config_error(j, "immersions.lag");
  j = minimal();
  j["immersions"]["lag"]["grid"]["ns"] = 2;
  expect_config_error(j, "ns and nt");
  expect_config_error(json::array(), "top level");
  CHECK_THROWS_AS(Config::from_text("{not json"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/path.json"), ConfigError);
  CHECK_THROWS_AS(Config::load("builtin:nothing"), ConfigError);
}

TEST_CASE("builtin configurations") {
  const std::vector<std::string> names{"h2xh2",  "planexh2",       "planexs2", "plane2",
                                       "s2xh2", "s2xs2_eps_minus", "s2xs2_eps_plus"};
  std::vector<std::string> sorted = builtin_config_names();
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> want = names;
  std::sort(want.begin(), want.end());
  CHECK(sorted == want);
  for (const std::string& n : builtin_config_names()) {
    const Config c = Config::load("builtin:" + n);
    CHECK(c.name() == n);
    CHECK(json::parse(builtin_config_text(n)) == Config::load_json("builtin:" + n));
  }
  CHECK(Config::load("builtin:s2xh2").product()->eps() == 1);
  CHECK(Config::load("builtin:h2xh2").product()->eps() == -1);
}

TEST_CASE("overrides") {
  json j = minimal();
  apply_override(j, "product.eps=-1");
  CHECK(j["product"]["eps"] == -1);
  apply_override(j, "suites.maslov.immersions=[\"lag\"]");
  CHECK(j["suites"]["maslov"]["immersions"] == json::array({"lag"}));
  apply_override(j, "curves.a.curvature_profile=0.5 + s");
  CHECK(j["curves"]["a"]["curvature_profile"] == "0.5 + s");
  apply_override(j, "new.deep.key=3.5");
  CHECK(j["new"]["deep"]["key"] == 3.5);
  CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=1"), ConfigError);
  CHECK(Config::from_json(j).product()->eps() == -1);
}

TEST_CASE("checks") {
  CHECK(Check::make("a", 1e-9, 1e-8).pass);
  CHECK(Check::make("a", 1e-8, 1e-8).pass);
  CHECK_FALSE(Check::make("a", 2e-8, 1e-8).pass);
  CHECK_FALSE(Check::make("a", std::nan(""), 1e-8).pass);
  CHECK(Check::make("a", 0.2, 0.1, Check::Bound::at_least).pass);
  CHECK_FALSE(Check::make("a", 0.05, 0.1, Check::Bound::at_least).pass);
  CHECK_FALSE(Check::make("a", std::nan(""), 0.1, Check::Bound::at_least).pass);
  SuiteReport empty;
  CHECK_FALSE(empty.pass());
}

TEST_CASE("suite registry") {
  const std::vector<std::string> order{"scalar-curvature", "conformal-flatness", "nijenhuis",    "cornu",
                                       "rank-one-minimal", "hamiltonian-cornu",  "rank-zero",    "maslov",
                                       "rank-two-obstruction", "frame-algebra",  "stability-probe", "convergence"};
  std::vector<std::string> got;
  for (const SuiteInfo& s : suite_registry()) got.emplace_back(s.name);
  CHECK(got == order);
  CHECK(has_suite("maslov"));
  CHECK_FALSE(has_suite("all"));
  const Config c = Config::from_json(minimal());
  CHECK_THROWS_AS(run_suite("unknown", c), ConfigError);
}

TEST_CASE("suite reports") {
  const Config c = Config::from_json(minimal());
  const SuiteReport r = run_suite("scalar-curvature", c);
  CHECK(r.pass());
  CHECK(r.seed == 5);
  CHECK(r.config == "mini");
  SuiteOptions seeded;
  seeded.seed = 9;
  CHECK(run_suite("scalar-curvature", c, seeded).seed == 9);
  // Deterministic, and byte-identical without a timestamp.
  const std::string a = to_json(run_suite("maslov", c), false).dump(2);
  const std::string b = to_json(run_suite("maslov", c), false).dump(2);
  CHECK(a == b);
  const auto with = to_json(r, true);
  CHECK(with.contains("timestamp"));
  CHECK_FALSE(to_json(r, false).contains("timestamp"));
  CHECK(with.at("pass") == true);
  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str().rfind("name,max_residual,node_i,node_j,tolerance,bound,pass\n", 0) == 0);
  std::ostringstream table;
  write_table(table, r);
  CHECK(table.str().find("PASS") != std::string::npos);

  // A wrong expectation fails honestly.
  json j = minimal();
  j["suites"]["scalar-curvature"]["expected"] = 1;
  CHECK_FALSE(run_suite("scalar-curvature", Config::from_json(j)).pass());
  // A tolerance override applies to upper-bound checks.
  j = minimal();
  j["suites"]["scalar-curvature"]["expected"] = 1e-3;
  const Config shifted = Config::from_json(j);
  CHECK_FALSE(run_suite("scalar-curvature", shifted).pass());
  SuiteOptions loose;
  loose.tol = 1e-2;
  CHECK(run_suite("scalar-curvature", shifted, loose).pass());
}

TEST_CASE("geometry behind the shipped suites") {
  const Config c = Config::from_json(minimal());
  for (const char* s : {"nijenhuis", "rank-one-minimal", "rank-two-obstruction", "frame-algebra"}) {
    const SuiteReport r = run_suite(s, c);
    CHECK_MESSAGE(r.pass(), s);
  }
  const SuiteReport flat = run_suite("conformal-flatness", c);
  CHECK(flat.pass());
}

TEST_CASE("fresnel integrals and observed orders") {
  for (double s : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const auto [c, sn] = fresnel_integrals(s);
    const auto [oc, os] = testing::fresnel_series(s);
    CHECK(std::abs(c - oc) < 1e-12);
    CHECK(std::abs(sn - os) < 1e-12);
  }
  // Scaling: int_0^s cos(lambda t^2/2) dt = F(s sqrt(lambda)) / sqrt(lambda).
  const auto [c2, s2] = fresnel_integrals(1.0, 4.0);
  const auto [c1, s1] = fresnel_integrals(2.0);
  CHECK(c2 == doctest::Approx(c1 / 2).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(s1 / 2).epsilon(1e-12));
  const std::vector<double> orders = observed_orders({1.0, 0.25, 0.0625});
  REQUIRE(orders.size() == 2);
  CHECK(orders[0] == doctest::Approx(2.0));
  CHECK(orders[1] == doctest::Approx(2.0));
  CHECK(observed_orders({1.0}).empty());
}
