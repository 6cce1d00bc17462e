#include "cvapprox/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvapprox/error.hpp"

namespace cvapprox {

namespace {

void check_order(const SampledFunction& f, int l) {
  if (l > f.order()) {
    throw Error(ErrorKind::order,
                "seminorm order " + std::to_string(l) + " exceeds function order " + std::to_string(f.order()));
  }
}

struct PointSup {
  double value = 0.0;
  std::size_t beta = 0;
};

// max over |beta| <= l at one point; first maximum wins.
PointSup point_sup(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                   const SeminormIndex& alpha, std::span<const double> x, std::vector<double>& blk) {
  PointSup r;
  const double w = fam.eval_unchecked(idx.j, idx.l, x);
  if (w == 0.0) return r;
  const std::size_t m = f.value_dim();
  const std::size_t nb = MultiIndexSet::get(f.dim(), idx.l).size();
  blk.resize(nb * m);
  f.block_unchecked(idx.l, x, blk);
  for (std::size_t b = 0; b < nb; ++b) {
    const double v = alpha(std::span<const double>(blk).subspan(b * m, m)) * w;
    if (v > r.value) {
      r.value = v;
      r.beta = b;
    }
  }
  return r;
}

}  // namespace

double seminorm_integrand(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                          const SeminormIndex& alpha, std::span<const double> x, const MultiIndex& beta) {
  check_order(f, idx.l);
  const auto& set = MultiIndexSet::get(f.dim(), idx.l);
  const std::size_t b = set.index_of(beta);
  if (b == MultiIndexSet::npos) throw Error(ErrorKind::order, "beta exceeds seminorm order");
  const std::size_t m = f.value_dim();
  std::vector<double> blk(set.size() * m);
  f.block_unchecked(idx.l, x, blk);
  return alpha(std::span<const double>(blk).subspan(b * m, m)) * fam.eval_unchecked(idx.j, idx.l, x);
}

SeminormValue weighted_sup(const SampledFunction& f, const PointSet& pts, const WeightFamily& fam,
                           const WeightIndex& idx, const SeminormIndex& alpha, const Region* skip) {
  check_order(f, idx.l);
  fam.check_index(idx);
  alpha.check_dim(f.value_dim());
  const auto& set = MultiIndexSet::get(f.dim(), idx.l);
  SeminormValue out;
  std::vector<double> blk;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto x = pts[p];
    if (skip && skip->contains(x)) continue;
    const PointSup s = point_sup(f, fam, idx, alpha, x, blk);
    if (!out.has_witness || s.value > out.value) {
      out.value = s.value;
      out.has_witness = true;
      out.witness_x.assign(x.begin(), x.end());
      out.witness_beta = set[s.beta];
    }
  }
  return out;
}

SeminormValue weighted_seminorm(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                                const SeminormIndex& alpha) {
  return weighted_sup(f, f.domain().grid(), fam, idx, alpha);
}

SeminormValue tail_seminorm(const SampledFunction& f, const Region& K, const WeightFamily& fam,
                            const WeightIndex& idx, const SeminormIndex& alpha) {
  return weighted_sup(f, f.domain().grid(), fam, idx, alpha, K.empty() ? nullptr : &K);
}

SeminormValue local_sup_seminorm(const SampledFunction& f, const Region& K, int l, const SeminormIndex& alpha) {
  check_order(f, l);
  alpha.check_dim(f.value_dim());
  const auto& set = MultiIndexSet::get(f.dim(), l);
  const std::size_t m = f.value_dim();
  std::vector<double> blk(set.size() * m);
  SeminormValue out;
  const auto& pts = K.grid();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    f.block_unchecked(l, pts[p], blk);
    for (std::size_t b = 0; b < set.size(); ++b) {
      const double v = alpha(std::span<const double>(blk).subspan(b * m, m));
      if (!out.has_witness || v > out.value) {
        out.value = v;
        out.has_witness = true;
        out.witness_x.assign(pts[p].begin(), pts[p].end());
        out.witness_beta = set[b];
      }
    }
  }
  return out;
}

TailCompact find_tail_compact(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                              const SeminormIndex& alpha, double eps, double delta, const Region& search,
                              std::span<const double> center) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  if (delta < 0.0) throw Error(ErrorKind::precondition, "delta must be non-negative");
  check_order(f, idx.l);
  fam.check_index(idx);
  alpha.check_dim(f.value_dim());
  const Region& dom = f.domain();
  const std::size_t d = f.dim();
  std::vector<double> c(d, 0.0);
  if (!center.empty()) c.assign(center.begin(), center.end());
  const auto h = dom.step();
  const auto& pts = dom.grid();
  const auto& set = MultiIndexSet::get(d, idx.l);
  constexpr long long kOutside = std::numeric_limits<long long>::max();

  // integrand sup per point and the stage at which the point joins K
  std::vector<PointSup> sup(pts.size());
  std::vector<long long> level(pts.size());
  std::vector<double> blk;
  long long t_max = 1;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    sup[p] = point_sup(f, fam, idx, alpha, pts[p], blk);
    if (!search.contains(pts[p])) {
      level[p] = kOutside;
      continue;
    }
    long long lv = 0;
    for (std::size_t a = 0; a < d; ++a) {
      lv = std::max(lv, static_cast<long long>(std::ceil(std::abs(pts[p][a] - c[a]) / h[a] - 1e-9)));
    }
    level[p] = lv;
    t_max = std::max(t_max, lv);
  }
  // tail(t) = max over points with level > t; sweep t upward over a level-sorted order
  std::vector<std::size_t> order(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });
  // suffix maxima with first-index tie break
  std::vector<std::size_t> best(pts.size() + 1, pts.size());
  for (std::size_t k = pts.size(); k-- > 0;) {
    const std::size_t p = order[k];
    const std::size_t q = best[k + 1];
    if (q == pts.size() || sup[p].value > sup[q].value || (sup[p].value == sup[q].value && p < q)) {
      best[k] = p;
    } else {
      best[k] = q;
    }
  }
  double best_tail = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (long long t = 1; t <= t_max; ++t) {
    while (k < order.size() && level[order[k]] <= t) ++k;
    Box cb{c, c};
    std::vector<double> hw(d);
    for (std::size_t a = 0; a < d; ++a) {
      hw[a] = static_cast<double>(t) * h[a];
      cb.lo[a] -= hw[a];
      cb.hi[a] += hw[a];
    }
    Region K = search.intersected(cb);
    if (K.empty()) continue;
    K = Region::on_lattice(K.boxes(), {dom.origin().begin(), dom.origin().end()}, {h.begin(), h.end()});
    if (delta > 0.0 && !dom.contains(K.inflated(delta))) break;
    const std::size_t w = best[k];
    const double tail = w == pts.size() ? 0.0 : sup[w].value;
    best_tail = std::min(best_tail, tail);
    if (tail < eps) {
      TailCompact out;
      out.K = std::move(K);
      out.half_widths = std::move(hw);
      out.steps = t;
      out.tail.value = tail;
      if (w < pts.size()) {
        out.tail.has_witness = true;
        out.tail.witness_x.assign(pts[w].begin(), pts[w].end());
        out.tail.witness_beta = set[sup[w].beta];
      }
      return out;
    }
  }
  throw Error(ErrorKind::criterion_failure, "no tail compact with tail below " + std::to_string(eps), best_tail);
}

}  // namespace cvapprox
