#include "cvapprox/scenario.hpp"

#include <cmath>
#include <fstream>

#include "cvapprox/error.hpp"

namespace cvapprox {

using nlohmann::json;

namespace {

std::vector<double> numbers(const json& j, std::size_t dim, const char* what) {
  if (!j.is_array() || j.size() != dim) throw Error(ErrorKind::parse, std::string(what) + " needs " + std::to_string(dim) + " numbers");
  return j.get<std::vector<double>>();
}

Box parse_box(const json& j, std::size_t dim) {
  return Box{numbers(j.at("lo"), dim, "box lo"), numbers(j.at("hi"), dim, "box hi")};
}

WeightFamily parse_family(const json& j, const Region& domain) {
  const std::string kind = j.at("kind").get<std::string>();
  const int k_max = j.value("k_max", 2);
  const int j_max = j.value("j_max", 3);
  const std::size_t d = domain.dim();
  if (kind == "schwartz") return schwartz_family(domain, k_max, j_max);
  if (kind == "exp_strips") return exp_strips_family(domain, k_max, j_max);
  if (kind == "exhaustion") {
    std::vector<Region> omegas;
    for (const auto& o : j.at("omegas")) omegas.push_back(parse_region(o, d, &domain));
    return exhaustion_family(domain, std::move(omegas), k_max);
  }
  if (kind == "om_finite") {
    std::vector<Expression> base;
    for (const auto& e : j.at("base")) base.push_back(Expression::parse(e.get<std::string>(), d));
    return om_finite_chain(domain, base, j_max, k_max);
  }
  if (kind == "custom") {
    std::vector<Expression> per_j;
    for (const auto& e : j.at("expressions")) per_j.push_back(Expression::parse(e.get<std::string>(), d));
    return expression_family(domain, std::move(per_j), k_max);
  }
  throw Error(ErrorKind::parse, "unknown family kind '" + kind + "'");
}

}  // namespace

Region parse_region(const json& j, std::size_t dim, const Region* lattice) {
  std::vector<Box> boxes;
  const json& bl = j.is_array() ? j : j.at("boxes");
  for (const auto& b : bl) boxes.push_back(parse_box(b, dim));
  if (boxes.empty()) throw Error(ErrorKind::parse, "region needs at least one box");
  if (lattice) {
    return Region::on_lattice(std::move(boxes), {lattice->origin().begin(), lattice->origin().end()},
                              {lattice->step().begin(), lattice->step().end()});
  }
  if (j.is_object() && j.contains("step")) {
    const auto step = numbers(j.at("step"), dim, "step");
    std::vector<double> origin(dim, std::numeric_limits<double>::infinity());
    for (const auto& b : boxes) {
      for (std::size_t a = 0; a < dim; ++a) origin[a] = std::min(origin[a], b.lo[a]);
    }
    if (j.contains("origin")) origin = numbers(j.at("origin"), dim, "origin");
    return Region::on_lattice(std::move(boxes), std::move(origin), step);
  }
  if (j.is_object() && j.contains("resolution")) {
    return Region(std::move(boxes), j.at("resolution").get<std::vector<int>>());
  }
  throw Error(ErrorKind::parse, "domain needs a step or a resolution");
}

json region_to_json(const Region& r) {
  json boxes = json::array();
  for (const auto& b : r.boxes()) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
  return boxes;
}

SeminormIndex parse_alpha(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "sup") return SeminormIndex::sup();
    throw Error(ErrorKind::parse, "unknown seminorm '" + s + "'");
  }
  if (j.contains("subset")) return SeminormIndex::subset(j.at("subset").get<std::vector<std::size_t>>());
  if (j.contains("weights")) return SeminormIndex::weighted(j.at("weights").get<std::vector<double>>());
  throw Error(ErrorKind::parse, "seminorm needs 'subset' or 'weights'");
}

QuadratureSpec parse_quadrature(const json& j) {
  QuadratureSpec q;
  if (j.contains("rule")) {
    const auto r = j.at("rule").get<std::string>();
    if (r == "midpoint") q.rule = QuadratureSpec::Rule::midpoint;
    else if (r == "gauss") q.rule = QuadratureSpec::Rule::gauss;
    else throw Error(ErrorKind::parse, "unknown quadrature rule '" + r + "'");
  }
  q.points_per_axis = j.value("points_per_axis", q.points_per_axis);
  q.refinement_levels = j.value("refinement_levels", q.refinement_levels);
  q.tol = j.value("tol", q.tol);
  q.validate();
  return q;
}

json to_json(const QuadratureSpec& q) {
  return {{"rule", to_string(q.rule)},
          {"points_per_axis", q.points_per_axis},
          {"refinement_levels", q.refinement_levels},
          {"tol", q.tol}};
}

double Scenario::delta_for(int j) const {
  if (delta_rule == "strip") return 1.0 / (2.0 * j + 2.0);
  return delta;
}

SampledFunction Scenario::make_function() const { return make_function(domain); }

SampledFunction Scenario::make_function(const Region& dom) const {
  const json& f = function_spec;
  const std::string kind = f.at("kind").get<std::string>();
  if (kind == "plane_waves") {
    std::vector<double> nodes;
    if (f.contains("nodes")) {
      nodes = f.at("nodes").get<std::vector<double>>();
    } else {
      const int count = f.at("count").get<int>();
      const double spacing = f.at("spacing").get<double>();
      for (int q = 0; q < count; ++q) nodes.push_back(spacing * q);
    }
    return plane_waves(dom, order, nodes);
  }
  if (kind == "gaussian") return gaussian(dom, order, f.at("vector").get<std::vector<double>>());
  if (kind == "polynomial_gaussian") {
    return polynomial_gaussian(dom, order, f.at("coeffs").get<std::vector<double>>(),
                               f.at("vector").get<std::vector<double>>());
  }
  if (kind == "zero") return zero_function(dom, order, f.value("value_dim", 1));
  if (kind == "expressions") return from_expressions(dom, order, f.at("coords").get<std::vector<std::string>>());
  throw Error(ErrorKind::parse, "unknown function kind '" + kind + "'");
}

Scenario parse_scenario(const json& j) {
  try {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    const std::size_t d = j.at("dim").get<std::size_t>();
    s.domain = parse_region(j.at("domain"), d);
    s.family = parse_family(j.at("family"), s.domain);
    s.function_spec = j.value("function", json{{"kind", "zero"}});
    s.order = j.value("order", 1);
    if (j.contains("alpha")) s.alpha = parse_alpha(j.at("alpha"));
    if (j.contains("index")) s.index = WeightIndex{j.at("index").value("j", 1), j.at("index").value("l", 0)};
    if (j.contains("eps")) s.eps = j.at("eps").get<std::vector<double>>();
    if (j.contains("delta")) {
      if (j.at("delta").is_string()) s.delta_rule = j.at("delta").get<std::string>();
      else s.delta = j.at("delta").get<double>();
    }
    if (!s.delta_rule.empty() && s.delta_rule != "strip") throw Error(ErrorKind::parse, "unknown delta rule '" + s.delta_rule + "'");
    if (j.contains("search")) s.search = parse_region(j.at("search"), d, &s.domain);
    s.n_max = j.value("n_max", s.n_max);
    if (j.contains("quadrature")) s.quad = parse_quadrature(j.at("quadrature"));
    if (j.contains("tensor")) {
      const json& t = j.at("tensor");
      const std::string mode = t.value("mode", "adaptive");
      if (mode == "a_priori") s.tensor.mode = TensorSettings::Mode::a_priori;
      else if (mode == "adaptive") s.tensor.mode = TensorSettings::Mode::adaptive;
      else throw Error(ErrorKind::parse, "unknown tensor mode '" + mode + "'");
      s.tensor.divisor = t.value("divisor", s.tensor.divisor);
      s.tensor.max_halvings = t.value("max_halvings", s.tensor.max_halvings);
      s.tensor.max_refine = t.value("max_refine", s.tensor.max_refine);
      s.tensor.max_lattice_points = t.value("max_lattice_points", s.tensor.max_lattice_points);
    }
    s.audit_region = s.domain;
    if (j.contains("audit")) {
      const json& a = j.at("audit");
      if (a.contains("region")) s.audit_region = parse_region(a.at("region"), d, &s.domain);
      if (a.contains("compact")) s.audit_compact = parse_region(a.at("compact"), d, &s.domain);
      for (const auto& v : a.value("vanishing", json::array())) {
        VanishingClaim c;
        c.jl = WeightIndex{v.at("jl").at(0).get<int>(), v.at("jl").at(1).get<int>()};
        c.im = WeightIndex{v.at("im").at(0).get<int>(), v.at("im").at(1).get<int>()};
        c.eps = v.at("eps").get<double>();
        if (v.contains("search")) c.search = parse_region(v.at("search"), d, &s.domain);
        s.vanishing.push_back(std::move(c));
      }
    }
    if (s.order < 0) throw Error(ErrorKind::parse, "order must be non-negative");
    for (double e : s.eps) {
      if (!(e > 0.0)) throw Error(ErrorKind::parse, "eps entries must be positive");
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open scenario " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

Scenario with_grid(const Scenario& s, int points_per_unit) {
  if (points_per_unit < 1) throw Error(ErrorKind::parse, "grid override must be positive");
  // same boxes, step 1 / points_per_unit on every axis
  Scenario out = s;
  const std::size_t d = s.domain.dim();
  std::vector<double> step(d, 1.0 / points_per_unit);
  out.domain = s.domain.resampled(step);
  auto relattice = [&](const Region& r) {
    return Region::on_lattice(r.boxes(), {out.domain.origin().begin(), out.domain.origin().end()}, step);
  };
  if (out.search) out.search = relattice(*out.search);
  out.audit_region = relattice(s.audit_region);
  if (out.audit_compact) out.audit_compact = relattice(*out.audit_compact);
  for (auto& v : out.vanishing) {
    if (v.search) v.search = relattice(*v.search);
  }
  // the family keeps its evaluator; only its sampling lattice moves
  std::optional<WeightFamily::Structure> st = s.family.structure();
  if (st) {
    for (auto& o : st->omega) o = relattice(o);
  }
  WeightFamily fam(s.family.kind(), out.domain, s.family.k_max(), s.family.j_max(),
                   [f = s.family](int jj, int l, std::span<const double> x) { return f.eval_unchecked(jj, l, x); },
                   std::move(st), s.family.monotone_in_l());
  fam.set_multiplier_chain(s.family.multiplier_chain());
  out.family = std::move(fam);
  return out;
}

}  // namespace cvapprox
