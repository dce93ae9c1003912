#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kahler/config.hpp"
#include "kahler/suites.hpp"
#include "kahler/variation.hpp"

namespace py = pybind11;
using namespace kahler;

namespace {

py::object json_to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::shared_ptr<const Surface2D> model(const std::string& name, double curvature) {
  if (name == "plane") return std::make_shared<const Surface2D>(Surface2D::plane());
  if (name == "sphere") return std::make_shared<const Surface2D>(Surface2D::sphere(curvature));
  if (name == "hyperbolic") return std::make_shared<const Surface2D>(Surface2D::hyperbolic(curvature));
  throw py::value_error("model must be 'plane', 'sphere' or 'hyperbolic'");
}

Bindings bind(double x, double y, std::optional<double> s) {
  Bindings b = Bindings::xy(x, y);
  if (s) b.set(Var::s, *s);
  return b;
}

Var var_of(const std::string& v) {
  if (v == "x") return Var::x;
  if (v == "y") return Var::y;
  if (v == "s") return Var::s;
  throw py::value_error("variable must be 'x', 'y' or 's'");
}

ProductVec vec(const ProductPoint& p, std::array<double, 4> c) { return {p, {c[0], c[1]}, {c[2], c[3]}}; }
ProductPoint point(std::array<double, 4> c) { return {{c[0], c[1]}, {c[2], c[3]}}; }

SuiteReport run(const std::string& config, const std::string& suite, std::optional<std::uint64_t> seed,
                std::optional<double> grid_step, std::optional<double> tol, const std::vector<std::string>& overrides) {
  nlohmann::json doc = Config::load_json(config);
  for (const std::string& o : overrides) apply_override(doc, o);
  return run_suite(suite, Config::from_json(doc), {seed, grid_step, tol});
}

}  // namespace

PYBIND11_MODULE(_kahler, m) {
  m.doc() = "Product Kahler surfaces, Lagrangian immersions and verification suites";

  py::register_exception<Error>(m, "KahlerError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& text) { return parse_expr(text); }), py::arg("text"))
      .def("eval", [](const Expr& e, double x, double y, std::optional<double> s) { return e.eval(bind(x, y, s)); },
           py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("s") = py::none())
      .def("diff", [](const Expr& e, const std::string& v) { return differentiate(e, var_of(v)); }, py::arg("var"))
      .def("__str__", &Expr::to_string)
      .def("__repr__", [](const Expr& e) { return "Expr(\"" + e.to_string() + "\")"; });

  py::class_<Surface2D, std::shared_ptr<Surface2D>>(m, "Surface")
      .def(py::init([](const std::string& lambda, std::array<double, 4> rect) {
             return std::make_shared<Surface2D>("user", parse_expr(lambda),
                                                ChartDomain::rect(rect[0], rect[1], rect[2], rect[3]));
           }),
           py::arg("conformal_factor"), py::arg("rect"))
      .def_static("model", [](const std::string& name, double c) { return std::const_pointer_cast<Surface2D>(model(name, c)); },
                  py::arg("name"), py::arg("curvature") = 1.0)
      .def_property_readonly("name", &Surface2D::name)
      .def("conformal_factor", [](const Surface2D& s, double x, double y) { return s.lambda({x, y}); })
      .def("gauss_curvature", [](const Surface2D& s, double x, double y) { return s.gauss_curvature({x, y}); })
      .def("contains", [](const Surface2D& s, double x, double y) { return s.contains({x, y}); });

  m.def(
      "integrate_curve",
      [](std::shared_ptr<Surface2D> s, std::array<double, 2> start, double angle, const std::string& curvature,
         double length, double step) {
        const Curve c = integrate_prescribed_curvature(s, {start[0], start[1]}, angle, parse_expr(curvature), length, step);
        std::vector<std::array<double, 6>> rows;
        rows.reserve(c.size());
        for (const CurveSample& p : c.samples())
          rows.push_back({p.s, p.point.x, p.point.y, p.tangent.x, p.tangent.y, p.curvature});
        return rows;
      },
      py::arg("surface"), py::arg("start"), py::arg("angle"), py::arg("curvature"), py::arg("length"),
      py::arg("step") = 1e-3, "Rows (s, x, y, v1, v2, k) of a curve with prescribed geodesic curvature k(s).");

  py::class_<KahlerProduct, std::shared_ptr<KahlerProduct>>(m, "Product")
      .def(py::init([](std::shared_ptr<Surface2D> a, std::shared_ptr<Surface2D> b, int eps) {
             return std::make_shared<KahlerProduct>(a, b, eps);
           }),
           py::arg("sigma1"), py::arg("sigma2"), py::arg("eps"))
      .def_property_readonly("eps", &KahlerProduct::eps)
      .def("metric", [](const KahlerProduct& K, std::array<double, 4> p, std::array<double, 4> X,
                        std::array<double, 4> Y) { return K.metric(vec(point(p), X), vec(point(p), Y)); })
      .def("omega", [](const KahlerProduct& K, std::array<double, 4> p, std::array<double, 4> X,
                       std::array<double, 4> Y) { return K.omega(vec(point(p), X), vec(point(p), Y)); })
      .def("scalar_curvature", [](const KahlerProduct& K, std::array<double, 4> p) { return K.scalar_curvature(point(p)); })
      .def("weyl_blocks",
           [](const KahlerProduct& K, std::array<double, 4> p) {
             const WeylBlocks w = K.weyl_blocks(point(p));
             return py::make_tuple(w.plus, w.minus);
           })
      .def("conformal_flatness_residual", [](const KahlerProduct& K, const std::vector<std::array<double, 4>>& pts) {
        std::vector<ProductPoint> ps;
        for (const auto& p : pts) ps.push_back(point(p));
        return conformal_flatness_residual(K, ps);
      });

  m.def("suites", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const SuiteInfo& s : suite_registry()) out.emplace_back(s.name, s.description);
    return out;
  });
  m.def("builtin_configs", [] { return builtin_config_names(); });
  m.def("config_json", [](const std::string& ref) { return json_to_python(Config::load_json(ref)); }, py::arg("ref"));
  m.def(
      "run_suite",
      [](const std::string& config, const std::string& suite, std::optional<std::uint64_t> seed,
         std::optional<double> grid_step, std::optional<double> tol, const std::vector<std::string>& overrides) {
        return json_to_python(to_json(run(config, suite, seed, grid_step, tol, overrides), false));
      },
      py::arg("config"), py::arg("suite"), py::arg("seed") = py::none(), py::arg("grid_step") = py::none(),
      py::arg("tol") = py::none(), py::arg("overrides") = std::vector<std::string>{},
      "Runs a suite against 'builtin:NAME' or a config path and returns the report as a dict.");
  m.def(
      "stability_probe",
      [](const std::string& config, const std::string& immersion, const std::string& family, std::size_t count,
         std::uint64_t seed) {
        const Config c = Config::load(config);
        ProbeOptions opt;
        const auto f = parse_family(family);
        if (!f) throw py::value_error("unknown test-function family '" + family + "'");
        opt.family = *f;
        opt.count = count;
        opt.seed = seed;
        return py::module_::import("json").attr("loads")(to_json(stability_probe(c.immersion(immersion), opt)));
      },
      py::arg("config"), py::arg("immersion"), py::arg("family") = "separable-bumps", py::arg("count") = 200,
      py::arg("seed") = 1);
}
