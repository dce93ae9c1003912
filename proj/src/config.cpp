#include "kahler/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace kahler {

namespace detail {
// Generated at configure time from configs/*.json.
const std::vector<std::pair<std::string, std::string>>& builtin_table();
}  // namespace detail

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

double positive(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (!(x > 0.0)) fail(where, "must be positive");
  return x;
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

Point2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected [x, y]");
  return {number(v[0], where), number(v[1], where)};
}

Expr expression(const json& v, const std::string& where) {
  const std::string src = text(v, where);
  try {
    return parse_expr(src);
  } catch (const ParseError& e) {
    fail(where, std::string("bad expression: ") + e.what());
  }
}

ChartDomain domain_of(const json& d, const std::string& where) {
  const std::string type = text(require(d, "type", where), where + ".type");
  try {
    if (type == "plane") return ChartDomain::whole_plane();
    if (type == "disk") {
      const Point2 c = d.contains("center") ? point(d.at("center"), where + ".center") : Point2{0.0, 0.0};
      return ChartDomain::disk(c.x, c.y, positive(require(d, "radius", where), where + ".radius"));
    }
    if (type == "rect") {
      const json& b = require(d, "bounds", where);
      if (!b.is_array() || b.size() != 4) fail(where + ".bounds", "expected [xmin, xmax, ymin, ymax]");
      return ChartDomain::rect(number(b[0], where), number(b[1], where), number(b[2], where), number(b[3], where));
    }
  } catch (const PreconditionError& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown domain type '" + type + "'");
}

std::optional<Surface2D> model_of(const json& m, const std::string& where) {
  const std::string type = text(require(m, "type", where), where + ".type");
  if (type == "plane") return Surface2D::plane();
  if (type == "sphere") return Surface2D::sphere(m.contains("curvature") ? positive(m.at("curvature"), where) : 1.0);
  if (type == "hyperbolic")
    return Surface2D::hyperbolic(m.contains("magnitude") ? positive(m.at("magnitude"), where) : 1.0);
  fail(where + ".type", "unknown model '" + type + "'");
}

std::array<double, 4> default_box(const ChartDomain& d) {
  const auto& b = d.bounds();
  if (d.shape() == ChartDomain::Shape::disk) {
    const double r = std::min(0.5 * b[2], 2.0);
    return {b[0] - r, b[0] + r, b[1] - r, b[1] + r};
  }
  auto clip = [](double lo, double hi) -> std::pair<double, double> {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {-2.0, 2.0};
    const double pad = 0.1 * (hi - lo);
    return {lo + pad, hi - pad};
  };
  const auto [x0, x1] = clip(b[0], b[1]);
  const auto [y0, y1] = clip(b[2], b[3]);
  return {x0, x1, y0, y1};
}

Grid grid_of(const json& g, const std::string& where, std::optional<double> step_override) {
  Grid grid;
  grid.s0 = number(require(g, "s0", where), where + ".s0");
  grid.t0 = number(require(g, "t0", where), where + ".t0");
  const double step = positive(require(g, "step", where), where + ".step");
  const json& ns = require(g, "ns", where);
  const json& nt = require(g, "nt", where);
  if (!ns.is_number_integer() || !nt.is_number_integer() || ns.get<long>() < 3 || nt.get<long>() < 3)
    fail(where, "ns and nt must be integers >= 3");
  grid.ns = ns.get<std::size_t>();
  grid.nt = nt.get<std::size_t>();
  grid.hs = grid.ht = step;
  if (step_override) {
    if (!(*step_override > 0.0)) fail(where, "grid step override must be positive");
    // Keep the covered rectangle: n_new - 1 = (n - 1) * step / new_step.
    auto resize = [&](std::size_t n) {
      const double cells = static_cast<double>(n - 1) * step / *step_override;
      return static_cast<std::size_t>(std::max(2.0, std::round(cells))) + 1;
    };
    grid.ns = resize(grid.ns);
    grid.nt = resize(grid.nt);
    grid.hs = grid.ht = *step_override;
  }
  return grid;
}

}  // namespace

ChartMap parse_chart_map(const json& pair, const std::string& where) {
  if (!pair.is_array() || pair.size() != 2) fail(where, "expected two expressions [fx, fy]");
  const Expr fx = expression(pair[0], where + "[0]");
  const Expr fy = expression(pair[1], where + "[1]");
  if (fx.depends_on(Var::s) || fy.depends_on(Var::s)) fail(where, "chart maps may only use x and y");
  return [fx, fy](Point2 p) {
    const Bindings b = Bindings::xy(p.x, p.y);
    return Point2{fx.eval(b), fy.eval(b)};
  };
}

Config Config::from_json(const json& j) {
  Config c;
  c.raw_ = j;
  if (!j.is_object()) fail("config", "top level must be an object");
  c.name_ = j.contains("name") ? text(j.at("name"), "name") : "unnamed";

  const json& surfaces = require(j, "surfaces", "config");
  if (!surfaces.is_object() || surfaces.empty()) fail("surfaces", "expected a non-empty object");
  for (const auto& [key, s] : surfaces.items()) {
    const std::string where = "surfaces." + key;
    const Expr lambda = expression(require(s, "lambda", where), where + ".lambda");
    if (lambda.depends_on(Var::s)) fail(where + ".lambda", "conformal factor may only use x and y");
    const ChartDomain domain = domain_of(require(s, "domain", where), where + ".domain");
    std::optional<DarbouxChart> darboux;
    std::optional<Surface2D> model;
    if (s.contains("model")) {
      model = model_of(s.at("model"), where + ".model");
      darboux = model->darboux();
    }
    auto surface = std::make_shared<const Surface2D>(key, lambda, domain, darboux);
    SurfaceEntry e;
    e.surface = surface;
    const auto& b = domain.bounds();
    e.anchor = s.contains("anchor") ? point(s.at("anchor"), where + ".anchor")
               : domain.shape() == ChartDomain::Shape::disk ? Point2{b[0], b[1]}
                                                            : Point2{0.0, 0.0};
    if (!surface->contains(e.anchor)) fail(where + ".anchor", "outside the chart domain");
    e.sample_box = default_box(domain);
    if (s.contains("sample_box")) {
      const json& sb = s.at("sample_box");
      if (!sb.is_array() || sb.size() != 4) fail(where + ".sample_box", "expected [xmin, xmax, ymin, ymax]");
      for (std::size_t k = 0; k < 4; ++k) e.sample_box[k] = number(sb[k], where + ".sample_box");
      if (!(e.sample_box[0] < e.sample_box[1] && e.sample_box[2] < e.sample_box[3]))
        fail(where + ".sample_box", "empty box");
    }
    // Corners and centre of the sample box must be usable points.
    const auto& bx = e.sample_box;
    for (Point2 p : {Point2{bx[0], bx[2]}, Point2{bx[1], bx[3]}, Point2{bx[0], bx[3]}, Point2{bx[1], bx[2]},
                     e.anchor}) {
      if (!surface->contains(p)) fail(where + ".sample_box", "extends outside the chart domain");
      try {
        const double l = surface->lambda(p);
        if (model) {
          const double lm = model->lambda(p);
          if (std::abs(l - lm) > 1e-12 * std::max(1.0, std::abs(lm)))
            fail(where + ".model", "conformal factor does not match the model");
        }
      } catch (const EvalError& e2) {
        fail(where + ".lambda", e2.what());
      } catch (const DomainError& e2) {
        fail(where + ".lambda", e2.what());
      }
    }
    c.surfaces_.emplace(key, std::move(e));
  }

  const json& product = require(j, "product", "config");
  c.sigma1_ = text(require(product, "sigma1", "product"), "product.sigma1");
  c.sigma2_ = text(require(product, "sigma2", "product"), "product.sigma2");
  for (const std::string* n : {&c.sigma1_, &c.sigma2_}) {
    if (!c.surfaces_.count(*n)) fail("product", "unknown surface '" + *n + "'");
  }
  const json& eps = require(product, "eps", "product");
  if (!eps.is_number_integer() || (eps.get<int>() != 1 && eps.get<int>() != -1)) fail("product.eps", "must be +1 or -1");
  c.product_ = std::make_shared<const KahlerProduct>(c.sigma1().surface, c.sigma2().surface, eps.get<int>());

  if (j.contains("curves")) {
    const json& curves = j.at("curves");
    if (!curves.is_object()) fail("curves", "expected an object");
    for (const auto& [key, cv] : curves.items()) {
      const std::string where = "curves." + key;
      const std::string sname = text(require(cv, "surface", where), where + ".surface");
      if (!c.surfaces_.count(sname)) fail(where + ".surface", "unknown surface '" + sname + "'");
      const Point2 start = point(require(cv, "start", where), where + ".start");
      const double angle = cv.contains("angle") ? number(cv.at("angle"), where + ".angle") : 0.0;
      const Expr k = cv.contains("curvature_profile") ? expression(cv.at("curvature_profile"), where + ".curvature_profile")
                                                      : Expr::number(0.0);
      if (k.depends_on(Var::x) || k.depends_on(Var::y)) fail(where + ".curvature_profile", "may only use s");
      const double length = positive(require(cv, "length", where), where + ".length");
      const double step = cv.contains("step") ? positive(cv.at("step"), where + ".step") : 1e-3;
      try {
        c.curves_.emplace(key, integrate_prescribed_curvature(c.surface(sname).surface, start, angle, k, length, step));
      } catch (const Error& e) {
        fail(where, e.what());
      }
    }
  }

  if (j.contains("immersions")) {
    const json& imms = j.at("immersions");
    if (!imms.is_object()) fail("immersions", "expected an object");
    for (const auto& [key, im] : imms.items()) {
      const std::string where = "immersions." + key;
      const std::string kind = text(require(im, "kind", where), where + ".kind");
      if (kind == "rank-one") {
        const json& cs = require(im, "curves", where);
        if (!cs.is_array() || cs.size() != 2) fail(where + ".curves", "expected two curve names");
        const std::string a = text(cs[0], where), b = text(cs[1], where);
        if (!c.curves_.count(a) || !c.curves_.count(b)) fail(where + ".curves", "unknown curve");
        if (c.curves_.at(a).surface_ptr() != c.sigma1().surface || c.curves_.at(b).surface_ptr() != c.sigma2().surface)
          fail(where + ".curves", "curves must lie on sigma1 and sigma2 respectively");
      } else if (kind == "graph") {
        const bool darboux = im.contains("darboux_map"), direct = im.contains("map");
        if (darboux == direct) fail(where, "graph needs exactly one of 'map' or 'darboux_map'");
        if (darboux) {
          parse_chart_map(im.at("darboux_map"), where + ".darboux_map");
          if (!c.sigma1().surface->darboux() || !c.sigma2().surface->darboux())
            fail(where, "darboux_map needs a model on both product factors");
        } else {
          parse_chart_map(im.at("map"), where + ".map");
        }
        grid_of(require(im, "grid", where), where + ".grid", std::nullopt);
      } else if (kind == "general") {
        parse_chart_map(require(im, "phi", where), where + ".phi");
        parse_chart_map(require(im, "psi", where), where + ".psi");
        grid_of(require(im, "grid", where), where + ".grid", std::nullopt);
      } else {
        fail(where + ".kind", "unknown immersion kind '" + kind + "'");
      }
    }
  }

  if (j.contains("suites") && !j.at("suites").is_object()) fail("suites", "expected an object");
  return c;
}

Config Config::from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

json Config::load_json(const std::string& ref) {
  const std::string prefix = "builtin:";
  std::string body;
  if (ref.rfind(prefix, 0) == 0) {
    body = builtin_config_text(ref.substr(prefix.size()));
  } else {
    std::ifstream in(ref);
    if (!in) throw ConfigError("cannot open config file '" + ref + "'");
    std::ostringstream os;
    os << in.rdbuf();
    body = os.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + ref + "' is not valid JSON: " + e.what());
  }
}

Config Config::from_file(const std::string& path) { return from_json(load_json(path)); }

Config Config::load(const std::string& ref) { return from_json(load_json(ref)); }

const SurfaceEntry& Config::surface(const std::string& name) const {
  auto it = surfaces_.find(name);
  if (it == surfaces_.end()) throw ConfigError("unknown surface '" + name + "'");
  return it->second;
}

const Curve& Config::curve(const std::string& name) const {
  auto it = curves_.find(name);
  if (it == curves_.end()) throw ConfigError("unknown curve '" + name + "'");
  return it->second;
}

bool Config::has_immersion(const std::string& name) const {
  return raw_.contains("immersions") && raw_.at("immersions").contains(name);
}

std::vector<std::string> Config::immersion_names() const {
  std::vector<std::string> out;
  if (raw_.contains("immersions"))
    for (const auto& [key, v] : raw_.at("immersions").items()) out.push_back(key);
  return out;
}

std::string Config::immersion_kind(const std::string& name) const {
  if (!has_immersion(name)) throw ConfigError("unknown immersion '" + name + "'");
  return raw_.at("immersions").at(name).at("kind").get<std::string>();
}

Immersion Config::immersion(const std::string& name, std::optional<double> grid_step) const {
  if (!has_immersion(name)) throw ConfigError("unknown immersion '" + name + "'");
  const json& im = raw_.at("immersions").at(name);
  const std::string where = "immersions." + name;
  const std::string kind = im.at("kind").get<std::string>();
  if (kind == "rank-one") {
    const Curve& a = curve(im.at("curves")[0].get<std::string>());
    const Curve& b = curve(im.at("curves")[1].get<std::string>());
    return build_rank_one(product_, a, b);
  }
  const Grid grid = grid_of(im.at("grid"), where + ".grid", grid_step);
  if (kind == "graph") {
    if (im.contains("darboux_map"))
      return build_graph(product_, grid, darboux_graph_map(*product_, parse_chart_map(im.at("darboux_map"), where)));
    return build_graph(product_, grid, parse_chart_map(im.at("map"), where));
  }
  return build_map(product_, grid, parse_chart_map(im.at("phi"), where), parse_chart_map(im.at("psi"), where));
}

json Config::suite_params(const std::string& suite) const {
  if (raw_.contains("suites") && raw_.at("suites").contains(suite)) return raw_.at("suites").at(suite);
  return json::object();
}

const std::vector<std::string>& builtin_config_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, body] : detail::builtin_table()) v.push_back(n);
    return v;
  }();
  return names;
}

const std::string& builtin_config_text(const std::string& name) {
  for (const auto& [n, body] : detail::builtin_table())
    if (n == name) return body;
  throw ConfigError("unknown builtin config '" + name + "'");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) throw ConfigError("override '" + assignment + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    begin = dot + 1;
  }
}

}  // namespace kahler
