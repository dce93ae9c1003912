#pragma once

// Named verification suites run against a configuration. Each suite produces a list of
// residual checks; a suite passes when every check does.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kahler/config.hpp"

namespace kahler {

struct Check {
  enum class Bound { below, at_least };

  std::string name;
  double max_residual = 0.0;
  std::optional<NodeIndex> node_of_max;
  double tolerance = 0.0;
  Bound bound = Bound::below;
  bool pass = false;

  // Sets pass from the value, tolerance and bound. NaN never passes.
  static Check make(std::string name, double value, double tolerance, Bound bound = Bound::below,
                    std::optional<NodeIndex> node = std::nullopt);
};

struct SuiteOptions {
  // Falls back to the suite's "seed" parameter, then 1.
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  // Replaces the tolerance of every upper-bound check.
  std::optional<double> tol;
};

struct SuiteReport {
  std::string suite;
  std::string config;
  std::uint64_t seed = 1;
  std::vector<Check> checks;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool pass() const;
};

struct SuiteInfo {
  const char* name;
  const char* description;
};

// Fixed registry order.
const std::vector<SuiteInfo>& suite_registry();
bool has_suite(const std::string& name);

// Throws ConfigError for unknown suites or unusable configurations.
SuiteReport run_suite(const std::string& name, const Config& config, const SuiteOptions& options = {});

nlohmann::ordered_json to_json(const SuiteReport& report, bool timestamp);
// CSV rows: name,max_residual,node_i,node_j,tolerance,bound,pass.
void write_csv(std::ostream& os, const SuiteReport& report);
void write_table(std::ostream& os, const SuiteReport& report);

// (int_0^s cos(lambda t^2 / 2) dt, int_0^s sin(lambda t^2 / 2) dt) by composite Gauss-Legendre.
std::pair<double, double> fresnel_integrals(double s, double lambda = 1.0);

// Observed orders log2(e_k / e_{k+1}) of a sequence of errors at halved steps.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace kahler
