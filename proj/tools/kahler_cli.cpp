// Command-line driver: runs verification suites on a configuration.
//
//   kahler run --config builtin:s2xh2 --suite conformal-flatness --out report.json
//   kahler list-suites
//   kahler list-configs
//
// Exit codes: 0 all checks pass, 1 some check fails, 2 bad configuration or arguments,
// 3 output could not be written.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kahler/suites.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string suite;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  std::optional<double> tol;
  bool no_timestamp = false;
  std::string format;
  std::vector<std::string> overrides;
};

void add_run_options(CLI::App& app, RunArgs& a) {
  app.add_option("--config", a.config, "config file path or builtin:NAME")->required();
  app.add_option("--suite", a.suite, "suite name, or 'all'")->required();
  app.add_option("--out", a.out, "report path (written in --format, default json)");
  app.add_option("--seed", a.seed, "random seed");
  app.add_option("--grid-step", a.grid_step, "grid step for graph and general immersions")->check(CLI::PositiveNumber);
  app.add_option("--tol", a.tol, "tolerance for upper-bound checks")->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", a.no_timestamp, "omit the timestamp from JSON reports");
  app.add_option("--format", a.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--set", a.overrides, "override a config field, e.g. product.eps=-1");
}

void render(std::ostream& os, const std::vector<kahler::SuiteReport>& reports, const std::string& format,
            bool timestamp) {
  if (format == "json") {
    if (reports.size() == 1) {
      os << kahler::to_json(reports.front(), timestamp).dump(2) << '\n';
    } else {
      nlohmann::ordered_json all = nlohmann::ordered_json::array();
      for (const auto& r : reports) all.push_back(kahler::to_json(r, timestamp));
      os << all.dump(2) << '\n';
    }
  } else if (format == "csv") {
    for (const auto& r : reports) kahler::write_csv(os, r);
  } else {
    for (const auto& r : reports) kahler::write_table(os, r);
  }
}

int run(const RunArgs& a) {
  nlohmann::json doc = kahler::Config::load_json(a.config);
  for (const std::string& o : a.overrides) kahler::apply_override(doc, o);
  const kahler::Config config = kahler::Config::from_json(doc);

  std::vector<std::string> suites;
  if (a.suite == "all") {
    for (const auto& s : kahler::suite_registry()) suites.emplace_back(s.name);
  } else {
    if (!kahler::has_suite(a.suite)) throw kahler::ConfigError("unknown suite '" + a.suite + "'");
    suites.push_back(a.suite);
  }
  kahler::SuiteOptions opt;
  opt.seed = a.seed;
  opt.grid_step = a.grid_step;
  opt.tol = a.tol;

  std::vector<kahler::SuiteReport> reports;
  bool pass = true;
  for (const std::string& s : suites) {
    reports.push_back(kahler::run_suite(s, config, opt));
    pass = pass && reports.back().pass();
  }

  const bool timestamp = !a.no_timestamp;
  if (!a.out.empty()) {
    std::ostringstream body;
    render(body, reports, a.format.empty() ? "json" : a.format, timestamp);
    std::ofstream f(a.out, std::ios::binary);
    if (!f || !(f << body.str()) || !f.flush()) throw kahler::IoError("cannot write report to '" + a.out + "'");
    render(std::cout, reports, "table", timestamp);
  } else {
    render(std::cout, reports, a.format.empty() ? "table" : a.format, timestamp);
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for product Kahler 4-manifolds"};
  app.require_subcommand(1);
  RunArgs args;
  CLI::App* run_cmd = app.add_subcommand("run", "run a suite on a configuration");
  add_run_options(*run_cmd, args);
  CLI::App* list_cmd = app.add_subcommand("list-suites", "print suite names and descriptions");
  CLI::App* configs_cmd = app.add_subcommand("list-configs", "print the names of the shipped configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& s : kahler::suite_registry()) std::cout << s.name << "  " << s.description << '\n';
      return 0;
    }
    if (configs_cmd->parsed()) {
      for (const auto& n : kahler::builtin_config_names()) std::cout << "builtin:" << n << '\n';
      return 0;
    }
    return run(args);
  } catch (const kahler::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const kahler::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const kahler::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
