#pragma once

// Geometry configurations: named surfaces, the product, curves, immersions, and per-suite
// parameters, read from JSON. Schema (all lengths in chart/arclength units):
//
//   {
//     "name": "s2xh2",
//     "surfaces": {
//       "S2": {"lambda": "4/(1+x^2+y^2)^2",
//              "domain": {"type": "disk", "center": [0, 0], "radius": 1000},
//              "model": {"type": "sphere", "curvature": 1},      optional, enables Darboux maps
//              "anchor": [0.3, 0.2],                              optional fixture base point
//              "sample_box": [-1, 1, -1, 1]}                      optional random sample region
//     },
//     "product": {"sigma1": "S2", "sigma2": "H2", "eps": 1},
//     "curves": {
//       "c1": {"surface": "S2", "start": [1, 0], "angle": 1.5707963267948966,
//              "curvature_profile": "0", "length": 3, "step": 0.001}
//     },
//     "immersions": {
//       "geo": {"kind": "rank-one", "curves": ["c1", "c2"]},
//       "lag": {"kind": "graph", "darboux_map": ["y + 0.2*x^2", "x"],
//               "grid": {"s0": 0.3, "t0": 0.2, "step": 0.001, "ns": 21, "nt": 21}},
//       "raw": {"kind": "graph", "map": ["2*x", "y"], "grid": {...}},
//       "gen": {"kind": "general", "phi": ["x", "y"], "psi": ["0.1", "0.2"], "grid": {...}}
//     },
//     "suites": {"scalar-curvature": {"samples": 100, "seed": 1}, ...}
//   }
//
// Domain types: "disk" (open, center + radius), "rect" (bounds [xmin, xmax, ymin, ymax]),
// "plane" (everything). Model types: "plane", "sphere" (curvature c > 0), "hyperbolic"
// (magnitude m > 0); a model's conformal factor must agree with "lambda".
// "darboux_map" composes the planar map with both Darboux charts; "map" is used as given.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kahler/curve.hpp"
#include "kahler/immersion.hpp"
#include "kahler/product.hpp"

namespace kahler {

// Parse or validation problem in a configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

struct SurfaceEntry {
  std::shared_ptr<const Surface2D> surface;
  Point2 anchor;
  std::array<double, 4> sample_box;  // xmin, xmax, ymin, ymax
};

class Config {
 public:
  // Validates and builds all surfaces, the product and the curves.
  static Config from_json(const nlohmann::json& j);
  static Config from_text(const std::string& text);
  static Config from_file(const std::string& path);
  // "builtin:NAME" or a file path.
  static Config load(const std::string& ref);
  // The unvalidated document behind load(), for applying overrides first.
  static nlohmann::json load_json(const std::string& ref);

  const std::string& name() const { return name_; }
  const nlohmann::json& raw() const { return raw_; }

  const SurfaceEntry& surface(const std::string& name) const;
  const std::string& sigma1_name() const { return sigma1_; }
  const std::string& sigma2_name() const { return sigma2_; }
  const SurfaceEntry& sigma1() const { return surface(sigma1_); }
  const SurfaceEntry& sigma2() const { return surface(sigma2_); }
  std::shared_ptr<const KahlerProduct> product() const { return product_; }

  const Curve& curve(const std::string& name) const;
  bool has_immersion(const std::string& name) const;
  std::vector<std::string> immersion_names() const;
  std::string immersion_kind(const std::string& name) const;
  // Builds the named immersion. grid_step replaces the graph/general grid step, keeping the
  // covered parameter rectangle.
  Immersion immersion(const std::string& name, std::optional<double> grid_step = std::nullopt) const;

  // Suite parameters (an empty object when absent).
  nlohmann::json suite_params(const std::string& suite) const;

 private:
  std::string name_;
  nlohmann::json raw_;
  std::map<std::string, SurfaceEntry> surfaces_;
  std::string sigma1_, sigma2_;
  std::shared_ptr<const KahlerProduct> product_;
  std::map<std::string, Curve> curves_;
};

// Names of the shipped configurations, in a fixed order.
const std::vector<std::string>& builtin_config_names();
// Raw JSON text of a shipped configuration; throws ConfigError for unknown names.
const std::string& builtin_config_text(const std::string& name);

// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when possible and
// kept as a string otherwise. Missing intermediate objects are created.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Parses a chart map given as two expressions in x and y.
ChartMap parse_chart_map(const nlohmann::json& pair, const std::string& where);

}  // namespace kahler
