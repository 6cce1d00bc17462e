#include "cvapprox/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "cvapprox/error.hpp"

namespace cvapprox {

std::string to_string(const WeightIndex& idx) {
  return "(" + std::to_string(idx.j) + "," + std::to_string(idx.l) + ")";
}

const char* to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::schwartz: return "schwartz";
    case FamilyKind::exhaustion: return "exhaustion";
    case FamilyKind::exp_strips: return "exp_strips";
    case FamilyKind::om_finite: return "om_finite";
    case FamilyKind::custom: return "custom";
  }
  return "custom";
}

WeightFamily::WeightFamily(FamilyKind kind, Region domain, int k_max, int j_max, Evaluator eval,
                           std::optional<Structure> structure, bool monotone_in_l)
    : kind_(kind),
      domain_(std::move(domain)),
      k_max_(k_max),
      j_max_(j_max),
      eval_(std::move(eval)),
      structure_(std::move(structure)),
      monotone_(monotone_in_l) {
  if (domain_.empty()) throw Error(ErrorKind::precondition, "weight domain must be non-empty");
  if (k_max_ < 0 || j_max_ < 1) throw Error(ErrorKind::precondition, "need k_max >= 0 and j_max >= 1");
  if (structure_ && static_cast<int>(structure_->omega.size()) != j_max_) {
    throw Error(ErrorKind::precondition, "structure needs one region per j");
  }
}

std::vector<WeightIndex> WeightFamily::indices() const {
  std::vector<WeightIndex> out;
  for (int j = 1; j <= j_max_; ++j) {
    for (int l = 0; l <= k_max_; ++l) out.push_back({j, l});
  }
  return out;
}

void WeightFamily::check_index(const WeightIndex& idx) const {
  if (idx.j < 1 || idx.j > j_max_ || idx.l < 0 || idx.l > k_max_) {
    throw Error(ErrorKind::index, "weight index " + to_string(idx) + " not in family");
  }
}

double WeightFamily::eval(const WeightIndex& idx, std::span<const double> x) const {
  check_index(idx);
  if (x.size() != dim() || !domain_.contains(x)) throw Error(ErrorKind::domain, "point outside weight domain");
  return eval_(idx.j, idx.l, x);
}

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

WeightFamily schwartz_family(Region domain, int k_max, int j_max) {
  auto eval = [](int, int l, std::span<const double> x) { return std::pow(1.0 + norm2(x), 0.5 * l); };
  return WeightFamily(FamilyKind::schwartz, std::move(domain), k_max, j_max, eval, std::nullopt, true);
}

WeightFamily exhaustion_family(Region domain, std::vector<Region> omegas, int k_max) {
  const int j_max = static_cast<int>(omegas.size());
  auto shared = std::make_shared<const std::vector<Region>>(omegas);
  auto eval = [shared](int j, int, std::span<const double> x) {
    return (*shared)[static_cast<std::size_t>(j - 1)].contains(x) ? 1.0 : 0.0;
  };
  WeightFamily::Structure s{std::move(omegas), [](int, int, std::span<const double>) { return 1.0; }};
  return WeightFamily(FamilyKind::exhaustion, std::move(domain), k_max, j_max, eval, std::move(s), true);
}

WeightFamily exp_strips_family(Region domain, int k_max, int j_max) {
  if (domain.dim() != 2) throw Error(ErrorKind::precondition, "strip family lives in two dimensions");
  const Box bb = domain.bounding_box();
  const auto step = domain.step();
  const auto origin = domain.origin();
  std::vector<Region> omegas;
  for (int j = 1; j <= j_max; ++j) {
    const double lo = 1.0 / (j + 1);
    const double hi = j + 1.0;
    std::vector<Box> boxes{Box{{bb.lo[0], -hi}, {bb.hi[0], -lo}}, Box{{bb.lo[0], lo}, {bb.hi[0], hi}}};
    omegas.push_back(Region::on_lattice(std::move(boxes), {origin.begin(), origin.end()}, {step.begin(), step.end()}));
  }
  auto smooth = [](int j, int, std::span<const double> x) { return std::exp(-std::abs(x[0]) / (j + 1)); };
  auto shared = std::make_shared<const std::vector<Region>>(omegas);
  auto eval = [smooth, shared](int j, int l, std::span<const double> x) {
    return (*shared)[static_cast<std::size_t>(j - 1)].contains(x) ? smooth(j, l, x) : 0.0;
  };
  WeightFamily::Structure s{std::move(omegas), smooth};
  return WeightFamily(FamilyKind::exp_strips, std::move(domain), k_max, j_max, eval, std::move(s), true);
}

WeightFamily om_finite_family(Region domain, std::vector<std::vector<Expression>> gauge_sets, int k_max) {
  const int j_max = static_cast<int>(gauge_sets.size());
  for (const auto& set : gauge_sets) {
    if (set.empty()) throw Error(ErrorKind::precondition, "gauge sets must be non-empty");
  }
  auto shared = std::make_shared<const std::vector<std::vector<Expression>>>(std::move(gauge_sets));
  auto eval = [shared](int j, int l, std::span<const double> x) {
    double m = 0.0;
    const Expression::Params p{static_cast<double>(j), static_cast<double>(l)};
    for (const auto& g : (*shared)[static_cast<std::size_t>(j - 1)]) m = std::max(m, std::abs(g.eval(x, p)));
    return m;
  };
  return WeightFamily(FamilyKind::om_finite, std::move(domain), k_max, j_max, eval, std::nullopt, true);
}

WeightFamily om_finite_chain(Region domain, const std::vector<Expression>& base, int j_max, int k_max) {
  std::vector<std::vector<Expression>> sets;
  const std::size_t d = domain.dim();
  for (int j = 1; j <= j_max; ++j) {
    std::vector<Expression> set;
    for (int k = 0; k < j; ++k) {
      for (const auto& g : base) {
        set.push_back(Expression::parse("(" + g.text() + ")*(1+|x|^2)^" + std::to_string(k), d));
      }
    }
    sets.push_back(std::move(set));
  }
  auto fam = om_finite_family(std::move(domain), std::move(sets), k_max);
  fam.set_multiplier_chain(true);
  return fam;
}

WeightFamily expression_family(Region domain, std::vector<Expression> per_j, int k_max) {
  const int j_max = static_cast<int>(per_j.size());
  auto shared = std::make_shared<const std::vector<Expression>>(std::move(per_j));
  auto eval = [shared](int j, int l, std::span<const double> x) {
    return (*shared)[static_cast<std::size_t>(j - 1)].eval(x, Expression::Params{static_cast<double>(j), static_cast<double>(l)});
  };
  return WeightFamily(FamilyKind::custom, std::move(domain), k_max, j_max, eval);
}

namespace {

std::vector<std::vector<double>> tabulate(const WeightFamily& fam, const PointSet& pts,
                                          const std::vector<WeightIndex>& idx) {
  std::vector<std::vector<double>> v(idx.size(), std::vector<double>(pts.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t p = 0; p < pts.size(); ++p) v[i][p] = fam.eval_unchecked(idx[i].j, idx[i].l, pts[p]);
  }
  return v;
}

std::vector<double> to_vec(std::span<const double> x) { return {x.begin(), x.end()}; }

}  // namespace

DirectedReport check_directed(const WeightFamily& fam, const Region& region) {
  const auto& pts = region.grid();
  const auto idx = fam.indices();
  const auto v = tabulate(fam, pts, idx);
  DirectedReport rep;
  rep.points = pts.size();
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      DirectedPair pr;
      pr.a = idx[a];
      pr.b = idx[b];
      const int jtop = std::max(idx[a].j, idx[b].j);
      double best = inf;
      std::size_t best_c = idx.size();
      auto key = [&](std::size_t c) { return std::make_tuple(idx[c].l, std::abs(idx[c].j - jtop), idx[c].j); };
      std::size_t witness_p = pts.size();
      for (std::size_t c = 0; c < idx.size(); ++c) {
        double C = 0.0;
        std::size_t bad = pts.size();
        for (std::size_t p = 0; p < pts.size(); ++p) {
          const double top = std::max(v[a][p], v[b][p]);
          if (top == 0.0) continue;
          if (v[c][p] == 0.0) {
            C = inf;
            bad = p;
            break;
          }
          C = std::max(C, top / v[c][p]);
        }
        bool take = best_c == idx.size();
        if (!take) take = C < best * (1.0 - 1e-12);
        if (!take) take = C <= best * (1.0 + 1e-12) && key(c) < key(best_c);
        if (take) {
          best = C;
          best_c = c;
          witness_p = bad;
        }
      }
      pr.ok = std::isfinite(best);
      pr.dominant = idx[best_c];
      pr.C = best;
      if (!pr.ok && witness_p < pts.size()) pr.witness = to_vec(pts[witness_p]);
      rep.pass = rep.pass && pr.ok;
      rep.pairs.push_back(std::move(pr));
    }
  }
  return rep;
}

LocalBoundReport check_locally_bounded(const WeightFamily& fam, const Region& K) {
  const auto& pts = K.grid();
  LocalBoundReport rep;
  rep.points = pts.size();
  for (const auto& idx : fam.indices()) {
    BoundEntry e{idx, 0.0, {}};
    std::size_t arg = pts.size();
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double w = fam.eval_unchecked(idx.j, idx.l, pts[p]);
      if (arg == pts.size() || w > e.value) {
        e.value = w;
        arg = p;
      }
    }
    if (arg < pts.size()) e.at = to_vec(pts[arg]);
    rep.pass = rep.pass && std::isfinite(e.value);
    rep.sups.push_back(std::move(e));
  }
  return rep;
}

AwayFromZeroReport check_locally_bounded_away_from_zero(const WeightFamily& fam, const Region& K) {
  const auto& pts = K.grid();
  AwayFromZeroReport rep;
  rep.points = pts.size();
  for (int l = 0; l <= fam.k_max(); ++l) {
    bool found = false;
    for (int j = 1; j <= fam.j_max() && !found; ++j) {
      double inf = std::numeric_limits<double>::infinity();
      std::size_t arg = pts.size();
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const double w = fam.eval_unchecked(j, l, pts[p]);
        if (w < inf) {
          inf = w;
          arg = p;
        }
      }
      if (arg < pts.size() && inf > 0.0) {
        rep.infs.push_back({{j, l}, inf, to_vec(pts[arg])});
        found = true;
      }
    }
    if (!found) {
      rep.pass = false;
      rep.failing_l.push_back(l);
    }
  }
  return rep;
}

std::optional<CenteredCompact> check_vanishing_ratio(const WeightFamily& fam, const WeightIndex& jl,
                                                     const WeightIndex& im, double eps, const Region& search,
                                                     std::span<const double> center) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  fam.check_index(jl);
  fam.check_index(im);
  const std::size_t d = fam.dim();
  std::vector<double> c(d, 0.0);
  if (!center.empty()) c.assign(center.begin(), center.end());
  const auto h = fam.domain().step();
  const auto& pts = fam.domain().grid();
  long long t = -1;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto x = pts[p];
    if (fam.eval_unchecked(jl.j, jl.l, x) <= eps * fam.eval_unchecked(im.j, im.l, x)) continue;
    if (!search.contains(x)) return std::nullopt;
    long long level = 0;
    for (std::size_t a = 0; a < d; ++a) {
      level = std::max(level, static_cast<long long>(std::ceil(std::abs(x[a] - c[a]) / h[a] - 1e-9)));
    }
    t = std::max(t, level);
  }
  CenteredCompact out;
  if (t < 0) {
    out.half_widths.assign(d, 0.0);
    return out;
  }
  Box cb{c, c};
  out.half_widths.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    out.half_widths[a] = static_cast<double>(t) * h[a];
    cb.lo[a] -= out.half_widths[a];
    cb.hi[a] += out.half_widths[a];
  }
  out.steps = t;
  const Region clipped = search.intersected(cb);
  out.K = clipped.empty() ? Region{}
                          : Region::on_lattice(clipped.boxes(), {fam.domain().origin().begin(), fam.domain().origin().end()},
                                               {h.begin(), h.end()});
  return out;
}

std::optional<Region> predicted_vanishing_compact(const WeightFamily& fam, const WeightIndex& jl,
                                                  const WeightIndex& im, double eps) {
  const auto& dom = fam.domain();
  const std::size_t d = fam.dim();
  const Box bb = dom.bounding_box();
  auto lattice = [&](std::vector<Box> boxes) {
    if (boxes.empty()) return Region{};
    return Region::on_lattice(std::move(boxes), {dom.origin().begin(), dom.origin().end()},
                              {dom.step().begin(), dom.step().end()});
  };
  auto centered = [&](double r) {
    Box b{std::vector<double>(d, -r), std::vector<double>(d, r)};
    for (std::size_t a = 0; a < d; ++a) {
      b.lo[a] = std::max(b.lo[a], bb.lo[a]);
      b.hi[a] = std::min(b.hi[a], bb.hi[a]);
    }
    return lattice({b});
  };
  if (eps >= 1.0 && (fam.kind() != FamilyKind::custom)) {
    // every ratio of the built-in families paired upward is at most one
    return Region{};
  }
  switch (fam.kind()) {
    case FamilyKind::schwartz: {
      if (im.l <= jl.l) return std::nullopt;
      return centered(std::sqrt(std::pow(eps, 2.0 / (jl.l - im.l)) - 1.0));
    }
    case FamilyKind::om_finite: {
      if (!fam.multiplier_chain() || im.j <= jl.j) return std::nullopt;
      return centered(std::sqrt(std::pow(eps, -1.0 / (im.j - jl.j)) - 1.0));
    }
    case FamilyKind::exhaustion: {
      if (im.j < jl.j) return std::nullopt;
      return fam.structure()->omega[static_cast<std::size_t>(jl.j - 1)];
    }
    case FamilyKind::exp_strips: {
      if (im.j <= jl.j) return std::nullopt;
      const double rate = 1.0 / (jl.j + 1) - 1.0 / (im.j + 1);
      const double L = -std::log(eps) / rate;
      Box clip = bb;
      clip.lo[0] = std::max(bb.lo[0], -L);
      clip.hi[0] = std::min(bb.hi[0], L);
      return fam.structure()->omega[static_cast<std::size_t>(jl.j - 1)].intersected(clip);
    }
    case FamilyKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

NonDegeneracyReport check_non_degenerate(const WeightFamily& fam, const Region& region) {
  const auto& pts = region.grid();
  NonDegeneracyReport rep;
  rep.points = pts.size();
  for (int l = 0; l <= fam.k_max(); ++l) {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      bool any = false;
      for (int j = 1; j <= fam.j_max() && !any; ++j) any = fam.eval_unchecked(j, l, pts[p]) > 0.0;
      if (!any) {
        rep.pass = false;
        rep.failing_l = l;
        rep.witness = to_vec(pts[p]);
        return rep;
      }
    }
  }
  return rep;
}

ScanCheck check_nonnegative(const WeightFamily& fam, const Region& region) {
  ScanCheck r;
  const auto& pts = region.grid();
  for (const auto& idx : fam.indices()) {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double w = fam.eval_unchecked(idx.j, idx.l, pts[p]);
      if (!(w >= 0.0) && r.pass) {
        r.pass = false;
        r.worst = w;
        r.witness = to_vec(pts[p]);
        r.idx = idx;
      }
    }
  }
  return r;
}

ScanCheck check_structure(const WeightFamily& fam, const Region& region) {
  ScanCheck r;
  if (!fam.structure()) return r;
  const auto& s = *fam.structure();
  const auto& pts = region.grid();
  for (const auto& idx : fam.indices()) {
    const auto& om = s.omega[static_cast<std::size_t>(idx.j - 1)];
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double expect = om.contains(pts[p]) ? s.smooth(idx.j, idx.l, pts[p]) : 0.0;
      const double got = fam.eval_unchecked(idx.j, idx.l, pts[p]);
      const double diff = std::abs(expect - got);
      if (diff > r.worst) {
        r.worst = diff;
        r.witness = to_vec(pts[p]);
        r.idx = idx;
      }
    }
  }
  r.pass = r.worst <= 1e-15;
  return r;
}

ScanCheck check_monotone(const WeightFamily& fam, const Region& region) {
  ScanCheck r;
  const auto& pts = region.grid();
  for (int j = 1; j <= fam.j_max(); ++j) {
    for (int l = 0; l < fam.k_max(); ++l) {
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const double gap = fam.eval_unchecked(j, l, pts[p]) - fam.eval_unchecked(j, l + 1, pts[p]);
        if (gap > r.worst) {
          r.worst = gap;
          r.witness = to_vec(pts[p]);
          r.idx = {j, l};
        }
      }
    }
  }
  r.pass = r.worst <= 0.0;
  return r;
}

}  // namespace cvapprox
