#include "cvapprox/audit.hpp"

#include <cmath>
#include <random>

namespace cvapprox {

using nlohmann::json;

namespace {

json index_json(const WeightIndex& i) { return {i.j, i.l}; }

// p(lambda v) = |lambda| p(v), p(v + w) <= p(v) + p(w), p >= 0 on random vectors
bool seminorm_axioms(const SeminormIndex& alpha, std::size_t m, std::uint64_t seed, json& out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(m), w(m), s(m), lv(m);
  bool ok = true;
  for (int t = 0; t < 200; ++t) {
    const double lambda = 3.0 * g(rng);
    for (std::size_t c = 0; c < m; ++c) {
      v[c] = g(rng);
      w[c] = g(rng);
      s[c] = v[c] + w[c];
      lv[c] = lambda * v[c];
    }
    const double pv = alpha(v), pw = alpha(w);
    ok = ok && pv >= 0.0 && alpha(s) <= pv + pw + 1e-12 * (1.0 + pv + pw) &&
         std::abs(alpha(lv) - std::abs(lambda) * pv) <= 1e-12 * (1.0 + std::abs(lambda) * pv);
  }
  out = {{"trials", 200}, {"seed", seed}, {"pass", ok}};
  return ok;
}

}  // namespace

bool compact_matches(const Region& found, const Region& predicted, std::span<const double> step) {
  if (found.empty() || predicted.empty()) return found.empty() && predicted.empty();
  const Box a = found.bounding_box();
  const Box b = predicted.bounding_box();
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double tol = step[k] * (1.0 + 1e-9);
    if (std::abs(a.lo[k] - b.lo[k]) > tol || std::abs(a.hi[k] - b.hi[k]) > tol) return false;
  }
  return true;
}

WeightAudit audit_weights(const Scenario& scn, std::uint64_t seed) {
  const WeightFamily& fam = scn.family;
  WeightAudit out;
  json& r = out.report;
  r["scenario"] = scn.name;
  r["family"] = to_string(fam.kind());
  r["k_max"] = fam.k_max();
  r["j_max"] = fam.j_max();

  const DirectedReport dir = check_directed(fam, scn.audit_region);
  json pairs = json::array();
  for (const auto& p : dir.pairs) {
    json e{{"a", index_json(p.a)}, {"b", index_json(p.b)}, {"ok", p.ok}};
    if (p.ok) {
      e["dominant"] = index_json(p.dominant);
      e["C"] = p.C;
    } else {
      e["witness"] = p.witness;
    }
    pairs.push_back(std::move(e));
  }
  r["directed"] = {{"pass", dir.pass}, {"points", dir.points}, {"pairs", pairs}};
  out.pass = out.pass && dir.pass;

  const Region K = scn.audit_compact ? *scn.audit_compact : scn.audit_region;
  const LocalBoundReport lb = check_locally_bounded(fam, K);
  json sups = json::array();
  for (const auto& e : lb.sups) sups.push_back({{"index", index_json(e.idx)}, {"sup", e.value}, {"at", e.at}});
  r["locally_bounded"] = {{"pass", lb.pass}, {"points", lb.points}, {"sups", sups}};
  out.pass = out.pass && lb.pass;

  const AwayFromZeroReport az = check_locally_bounded_away_from_zero(fam, K);
  json infs = json::array();
  for (const auto& e : az.infs) infs.push_back({{"index", index_json(e.idx)}, {"inf", e.value}, {"at", e.at}});
  r["away_from_zero"] = {{"pass", az.pass}, {"points", az.points}, {"infs", infs}, {"failing_l", az.failing_l}};
  out.pass = out.pass && az.pass;

  const NonDegeneracyReport nd = check_non_degenerate(fam, scn.audit_region);
  r["non_degenerate"] = {{"pass", nd.pass}, {"points", nd.points}, {"failing_l", nd.failing_l}, {"witness", nd.witness}};
  out.pass = out.pass && nd.pass;

  auto scan = [&](const char* name, const ScanCheck& c) {
    r[name] = {{"pass", c.pass}, {"worst", c.worst}, {"witness", c.witness}, {"index", index_json(c.idx)}};
    out.pass = out.pass && c.pass;
  };
  scan("nonnegative", check_nonnegative(fam, scn.audit_region));
  if (fam.structure()) scan("structure", check_structure(fam, scn.audit_region));
  if (fam.monotone_in_l()) scan("monotone", check_monotone(fam, scn.audit_region));

  json claims = json::array();
  for (const auto& c : scn.vanishing) {
    const Region search = c.search ? *c.search : fam.domain();
    json e{{"jl", index_json(c.jl)}, {"im", index_json(c.im)}, {"eps", c.eps}};
    const auto found = check_vanishing_ratio(fam, c.jl, c.im, c.eps, search);
    const auto predicted = predicted_vanishing_compact(fam, c.jl, c.im, c.eps);
    bool ok = found.has_value();
    if (found) e["found"] = region_to_json(found->K);
    else e["found"] = nullptr;
    if (predicted) {
      e["predicted"] = region_to_json(*predicted);
      ok = ok && compact_matches(found->K, *predicted, fam.domain().step());
    }
    if (fam.kind() == FamilyKind::exp_strips && c.im.j > c.jl.j) {
      const double rate = 1.0 / (c.jl.j + 1) - 1.0 / (c.im.j + 1);
      e["formula"] = {{"rate", rate}, {"L", -std::log(c.eps) / rate}, {"delta", 1.0 / (2.0 * c.jl.j + 2.0)}};
    }
    e["pass"] = ok;
    out.pass = out.pass && ok;
    claims.push_back(std::move(e));
  }
  r["vanishing_ratio"] = claims;

  const std::size_t m = scn.make_function().value_dim();
  json ax;
  out.pass = seminorm_axioms(scn.alpha, m, seed, ax) && out.pass;
  r["seminorm_axioms"] = ax;
  r["pass"] = out.pass;
  return out;
}

}  // namespace cvapprox
