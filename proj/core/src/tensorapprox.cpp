#include "cvapprox/tensorapprox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "cvapprox/error.hpp"
#include "cvapprox/jet.hpp"

namespace cvapprox {

namespace {

// Dense box of lattice nodes; index with the last axis fastest.
struct LatticeBox {
  std::size_t d = 0;
  std::vector<double> origin, step;
  std::vector<long long> lo;
  std::vector<long long> n;
  std::size_t total = 0;

  LatticeBox(const Box& bb, std::vector<double> org, std::vector<double> h)
      : d(org.size()), origin(std::move(org)), step(std::move(h)), lo(d), n(d) {
    total = 1;
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = static_cast<long long>(std::ceil((bb.lo[a] - origin[a]) / step[a] - 1e-9));
      const long long hi = static_cast<long long>(std::floor((bb.hi[a] - origin[a]) / step[a] + 1e-9));
      n[a] = std::max(0LL, hi - lo[a] + 1);
      total *= static_cast<std::size_t>(n[a]);
    }
  }
  // lattice offsets relative to lo; -1 when outside
  long long index(std::span<const long long> k) const {
    long long i = 0;
    for (std::size_t a = 0; a < d; ++a) {
      if (k[a] < 0 || k[a] >= n[a]) return -1;
      i = i * n[a] + k[a];
    }
    return i;
  }
  void coords(std::size_t i, std::span<long long> k) const {
    for (std::size_t a = d; a-- > 0;) {
      k[a] = static_cast<long long>(i % static_cast<std::size_t>(n[a]));
      i /= static_cast<std::size_t>(n[a]);
    }
  }
  void point(std::span<const long long> k, std::span<double> x) const {
    for (std::size_t a = 0; a < d; ++a) x[a] = origin[a] + static_cast<double>(lo[a] + k[a]) * step[a];
  }
};

// Calls fn(k) for every lattice offset at Chebyshev distance exactly t from
// k0, clipped to [0, dims). A node is visited once, on the first axis where
// its offset reaches t.
template <class Fn>
void for_each_shell(std::span<const long long> k0, long long t, std::span<const long long> dims, Fn&& fn) {
  const std::size_t d = k0.size();
  std::vector<long long> lo(d), hi(d), k(d);
  if (t == 0) {
    for (std::size_t a = 0; a < d; ++a) {
      if (k0[a] < 0 || k0[a] >= dims[a]) return;
    }
    fn(std::span<const long long>(k0.data(), d));
    return;
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      bool empty = false;
      for (std::size_t b = 0; b < d; ++b) {
        if (b == a) {
          lo[b] = hi[b] = k0[b] + sgn * t;
        } else {
          const long long w = b < a ? t - 1 : t;
          lo[b] = k0[b] - w;
          hi[b] = k0[b] + w;
        }
        lo[b] = std::max(lo[b], 0LL);
        hi[b] = std::min(hi[b], dims[b] - 1);
        empty = empty || lo[b] > hi[b];
      }
      if (empty) continue;
      k = lo;
      while (true) {
        fn(std::span<const long long>(k));
        std::size_t b = d;
        while (b-- > 0) {
          if (k[b] < hi[b]) {
            ++k[b];
            break;
          }
          k[b] = lo[b];
        }
        if (b == static_cast<std::size_t>(-1)) break;
      }
    }
  }
}

// lattice points in the bounding box of r, the count a cover lattice allocates
std::size_t lattice_span(const Region& r) {
  if (r.empty()) return 0;
  const Box b = r.bounding_box();
  double n = 1.0;
  for (std::size_t a = 0; a < b.lo.size(); ++a) n *= std::floor((b.hi[a] - b.lo[a]) / r.step()[a] + 0.5) + 1.0;
  return static_cast<std::size_t>(n);
}

double lipschitz_estimate(const SampledFunction& f, const Region& W, const SeminormIndex& alpha) {
  const std::size_t d = f.dim();
  const std::size_t m = f.value_dim();
  const auto& pts = W.grid();
  const auto h = W.step();
  std::vector<double> v0(m), v1(m), y(d);
  double L = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    f.value_unchecked(pts[p], v0);
    for (std::size_t a = 0; a < d; ++a) {
      std::copy(pts[p].begin(), pts[p].end(), y.begin());
      y[a] += h[a];
      if (!W.contains(y)) continue;
      f.value_unchecked(y, v1);
      L = std::max(L, alpha.distance(v1, v0) / h[a]);
    }
  }
  return L;
}

// Nearest chosen center: brute force while small, then a bucket grid.
class CenterIndex {
 public:
  CenterIndex(std::size_t d, Box extent) : d_(d), extent_(std::move(extent)) {}

  void add(std::span<const double> c, double typical_radius) {
    pts_.push_back(c);
    if (buckets_.empty() && pts_.size() > kBrute) build(typical_radius);
    else if (!buckets_.empty()) insert(pts_.size() - 1);
  }

  double nearest(std::span<const double> x) const {
    double best = std::numeric_limits<double>::infinity();
    if (buckets_.empty()) {
      for (std::size_t i = 0; i < pts_.size(); ++i) best = std::min(best, distance(x, pts_[i]));
      return best;
    }
    std::vector<long long> k0(d_);
    for (std::size_t a = 0; a < d_; ++a) k0[a] = cell(a, x[a]);
    long long max_ring = 0;
    for (std::size_t a = 0; a < d_; ++a) max_ring = std::max({max_ring, k0[a], dims_[a] - 1 - k0[a]});
    for (long long r = 0; r <= max_ring; ++r) {
      if (best <= (static_cast<double>(r) - 1.0) * cell_) break;
      for_each_shell(k0, r, dims_, [&](std::span<const long long> kk) {
        std::size_t b = 0;
        for (std::size_t a = 0; a < d_; ++a) b = b * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(kk[a]);
        for (std::size_t i : buckets_[b]) best = std::min(best, distance(x, pts_[i]));
      });
    }
    return best;
  }

 private:
  static constexpr std::size_t kBrute = 64;

  long long cell(std::size_t a, double v) const {
    const long long c = static_cast<long long>(std::floor((v - extent_.lo[a]) / cell_));
    return std::clamp(c, 0LL, dims_[a] - 1);
  }

  void build(double typical_radius) {
    double vol = 1.0;
    for (std::size_t a = 0; a < d_; ++a) vol *= std::max(extent_.hi[a] - extent_.lo[a], 1e-12);
    cell_ = std::max(typical_radius, std::pow(vol / 1e6, 1.0 / static_cast<double>(d_)));
    dims_.assign(d_, 1);
    std::size_t total = 1;
    for (std::size_t a = 0; a < d_; ++a) {
      dims_[a] = std::max(1LL, static_cast<long long>(std::ceil((extent_.hi[a] - extent_.lo[a]) / cell_)) + 1);
      total *= static_cast<std::size_t>(dims_[a]);
    }
    buckets_.assign(total, {});
    for (std::size_t i = 0; i < pts_.size(); ++i) insert(i);
  }

  void insert(std::size_t i) {
    std::size_t b = 0;
    for (std::size_t a = 0; a < d_; ++a) b = b * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(cell(a, pts_[i][a]));
    buckets_[b].push_back(i);
  }

  std::size_t d_;
  Box extent_;
  PointSet pts_{d_};
  double cell_ = 1.0;
  std::vector<long long> dims_;
  std::vector<std::vector<std::size_t>> buckets_;
};

struct HeapEntry {
  double key;
  std::size_t idx;
  bool operator<(const HeapEntry& o) const {
    // max-heap on key, then lower index first
    if (key != o.key) return key < o.key;
    return idx > o.idx;
  }
};

Region eroded(const Region& r, double by) {
  std::vector<Box> out;
  for (const auto& b : r.boxes()) {
    Box e = b.inflated(-by);
    bool ok = true;
    for (std::size_t a = 0; a < e.dim(); ++a) ok = ok && e.lo[a] <= e.hi[a];
    if (ok) out.push_back(std::move(e));
  }
  if (out.empty()) return Region{};
  return Region::on_lattice(std::move(out), {r.origin().begin(), r.origin().end()}, {r.step().begin(), r.step().end()});
}

Cover cover_at(const SampledFunction& f, const Region& K, const WeightFamily& fam, int j, const SeminormIndex& alpha,
               double eps, const CoverOptions& opt, int r) {
  const std::size_t d = f.dim();
  const std::size_t m = f.value_dim();
  const Region& dom = f.domain();
  Cover cv;
  cv.K = K;
  cv.eps = eps;
  cv.refine = r;
  cv.step.resize(d);
  for (std::size_t a = 0; a < d; ++a) cv.step[a] = dom.step()[a] / r;
  std::vector<double> origin(dom.origin().begin(), dom.origin().end());
  double hmax = *std::max_element(cv.step.begin(), cv.step.end());
  double cell_diag = 0.0;
  for (double h : cv.step) cell_diag += h * h;
  cell_diag = std::sqrt(cell_diag);

  Region W = Region::on_lattice(K.inflated(hmax).boxes(), origin, cv.step);
  if (opt.support_constraint) W = W.clipped_to(Region::on_lattice(opt.support_constraint->boxes(), origin, cv.step));
  if (W.empty() || !dom.contains(W)) throw Error(ErrorKind::geometry, "cover neighbourhood leaves the gridded domain");
  cv.W = W;
  const Region Kc = Region::on_lattice(K.boxes(), origin, cv.step);

  const LatticeBox lat(W.bounding_box(), origin, cv.step);
  if (lat.total > opt.max_lattice_points) throw Error(ErrorKind::resolution, "cover lattice exceeds the point budget");
  std::vector<char> inW(lat.total, 0), inK(lat.total, 0);
  std::vector<long long> k(d);
  std::vector<double> x(d);
  double nu_sup = 0.0;
  for (std::size_t i = 0; i < lat.total; ++i) {
    lat.coords(i, k);
    lat.point(k, x);
    if (!W.contains(x)) continue;
    inW[i] = 1;
    inK[i] = Kc.contains(x) ? 1 : 0;
    nu_sup = std::max(nu_sup, fam.eval_unchecked(j, 0, x));
  }
  cv.N_const = 1.0 + nu_sup;
  cv.target = eps / cv.N_const;
  cv.centers = PointSet(d);

  std::vector<double> vals(lat.total * m);
  std::vector<char> have(lat.total, 0);
  auto value_at = [&](std::size_t i) -> std::span<const double> {
    if (!have[i]) {
      std::vector<long long> kk(d);
      std::vector<double> xx(d);
      lat.coords(i, kk);
      lat.point(kk, xx);
      f.value_unchecked(xx, std::span<double>(vals.data() + i * m, m));
      have[i] = 1;
    }
    return {vals.data() + i * m, m};
  };
  auto point_of = [&](std::size_t i, std::span<double> out) {
    std::vector<long long> kk(d);
    lat.coords(i, kk);
    lat.point(kk, out);
  };

  double diamW = W.diameter();
  // distance from center node c to the nearest violating W node, capped at diam W
  auto radius_for = [&](std::size_t c) {
    std::vector<long long> kc(d);
    lat.coords(c, kc);
    const auto fc = value_at(c);
    std::vector<double> fcv(fc.begin(), fc.end());
    double hmin = *std::min_element(cv.step.begin(), cv.step.end());
    double best = diamW;
    long long reach = 0;
    for (std::size_t a = 0; a < d; ++a) reach = std::max({reach, kc[a], lat.n[a] - 1 - kc[a]});
    for (long long t = 1; t <= reach; ++t) {
      if (static_cast<double>(t) * hmin >= best) break;
      for_each_shell(kc, t, lat.n, [&](std::span<const long long> kk) {
        const std::size_t i = static_cast<std::size_t>(lat.index(kk));
        if (!inW[i]) return;
        double dist2 = 0.0;
        for (std::size_t b = 0; b < d; ++b) {
          const double dd = static_cast<double>(kk[b] - kc[b]) * cv.step[b];
          dist2 += dd * dd;
        }
        const double dist = std::sqrt(dist2);
        if (dist < best && alpha.distance(value_at(i), fcv) >= cv.target) best = dist;
      });
    }
    return best;
  };

  CenterIndex index(d, W.bounding_box());
  std::vector<char> covered(lat.total, 0);
  double radius_sum = 0.0;
  auto add_center = [&](std::size_t c) {
    const double R = radius_for(c);
    point_of(c, x);
    if (R <= cell_diag) {
      throw Error(ErrorKind::resolution, "oscillation radius below the cover lattice resolution", R);
    }
    if (cv.radii.size() >= opt.max_centers) throw Error(ErrorKind::resolution, "cover exceeds the center budget");
    cv.centers.push_back(x);
    cv.radii.push_back(R);
    radius_sum += R;
    index.add(x, radius_sum / static_cast<double>(cv.radii.size()));
    // mark covered K nodes
    std::vector<long long> kc(d), lo(d), hi(d), kk(d);
    lat.coords(c, kc);
    for (std::size_t a = 0; a < d; ++a) {
      const long long w = static_cast<long long>(std::ceil(R / cv.step[a]));
      lo[a] = std::max(0LL, kc[a] - w);
      hi[a] = std::min(lat.n[a] - 1, kc[a] + w);
    }
    kk = lo;
    while (true) {
      const std::size_t i = static_cast<std::size_t>(lat.index(kk));
      if (inK[i] && !covered[i]) {
        double dist2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
          const double dd = static_cast<double>(kk[a] - kc[a]) * cv.step[a];
          dist2 += dd * dd;
        }
        if (std::sqrt(dist2) + cell_diag < R) covered[i] = 1;
      }
      std::size_t a = d;
      while (a-- > 0) {
        if (kk[a] < hi[a]) {
          ++kk[a];
          break;
        }
        kk[a] = lo[a];
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  };

  std::size_t first = lat.total;
  for (std::size_t i = 0; i < lat.total; ++i) {
    if (inK[i]) {
      first = i;
      break;
    }
  }
  if (first == lat.total) throw Error(ErrorKind::geometry, "compact has no lattice points");
  add_center(first);

  std::priority_queue<HeapEntry> heap;
  for (std::size_t i = 0; i < lat.total; ++i) {
    if (!inK[i] || covered[i]) continue;
    point_of(i, x);
    heap.push({distance(x, cv.centers[0]), i});
  }
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    if (covered[top.idx]) continue;
    point_of(top.idx, x);
    const double dn = index.nearest(x);
    if (dn < top.key) {
      heap.push({dn, top.idx});
      continue;
    }
    add_center(top.idx);
  }
  return cv;
}

}  // namespace

Cover oscillation_cover(const SampledFunction& f, const Region& K, const WeightFamily& fam, int j,
                        const SeminormIndex& alpha, double eps, const CoverOptions& opt) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  if (K.empty()) throw Error(ErrorKind::precondition, "cover needs a non-empty compact");
  fam.check_index({j, 0});
  alpha.check_dim(f.value_dim());
  const std::size_t d = f.dim();
  const Region& dom = f.domain();
  int r = opt.refine;
  if (r <= 0) {
    const double hmax = dom.max_step();
    Region W1 = K.inflated(hmax);
    if (opt.support_constraint) W1 = W1.clipped_to(*opt.support_constraint);
    W1 = Region::on_lattice(W1.boxes(), {dom.origin().begin(), dom.origin().end()},
                            {dom.step().begin(), dom.step().end()});
    double nu_sup = 0.0;
    for (std::size_t p = 0; p < W1.grid().size(); ++p) nu_sup = std::max(nu_sup, fam.eval_unchecked(j, 0, W1.grid()[p]));
    const double L = lipschitz_estimate(f, W1, alpha);
    r = 1;
    if (L > 0.0) {
      const double r_est = eps / (1.0 + nu_sup) / L;
      const double h_want = r_est / (4.0 * std::sqrt(static_cast<double>(d)));
      r = static_cast<int>(std::ceil(hmax / h_want - 1e-9));
    }
    const double budget = std::pow(static_cast<double>(opt.max_lattice_points) /
                                       static_cast<double>(std::max<std::size_t>(lattice_span(W1), 1)),
                                   1.0 / static_cast<double>(d));
    r = std::clamp(r, 1, std::max(1, std::min(opt.max_refine, static_cast<int>(std::floor(budget)))));
  }
  while (true) {
    try {
      return cover_at(f, K, fam, j, alpha, eps, opt, r);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resolution || opt.refine > 0 || 2 * r > opt.max_refine) throw;
      if (std::pow(2.0 * r, static_cast<double>(d)) * static_cast<double>(lattice_span(K.inflated(dom.max_step()))) >
          static_cast<double>(opt.max_lattice_points)) {
        throw;
      }
      r *= 2;
    }
  }
}

PartitionBank::PartitionBank(const Cover& cover, const Region& domain, int max_deriv, const QuadratureSpec& quad)
    : d_(domain.dim()), order_(max_deriv), centers_(cover.centers), radii_(cover.radii) {
  if (max_deriv < 0 || max_deriv > Mollifier::kMaxDeriv) throw Error(ErrorKind::order, "partition order out of range");
  if (radii_.empty()) throw Error(ErrorKind::cover_defect, "empty cover");
  double diag = 0.0;
  for (double h : cover.step) diag += h * h;
  theta_ = build_cutoff(domain, cover.K, std::sqrt(diag), max_deriv, quad);
  // bucket grid over the union of ball boxes
  Box ext{std::vector<double>(d_, std::numeric_limits<double>::infinity()),
          std::vector<double>(d_, -std::numeric_limits<double>::infinity())};
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    for (std::size_t a = 0; a < d_; ++a) {
      ext.lo[a] = std::min(ext.lo[a], centers_[i][a] - radii_[i]);
      ext.hi[a] = std::max(ext.hi[a], centers_[i][a] + radii_[i]);
    }
  }
  std::vector<double> rs = radii_;
  std::nth_element(rs.begin(), rs.begin() + static_cast<std::ptrdiff_t>(rs.size() / 2), rs.end());
  double vol = 1.0;
  for (std::size_t a = 0; a < d_; ++a) vol *= ext.hi[a] - ext.lo[a];
  const double cell = std::max(rs[rs.size() / 2], std::pow(vol / 1e6, 1.0 / static_cast<double>(d_)));
  blo_ = ext.lo;
  bcell_.assign(d_, cell);
  bdims_.resize(d_);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d_; ++a) {
    bdims_[a] = static_cast<std::size_t>(std::ceil((ext.hi[a] - ext.lo[a]) / cell)) + 1;
    total *= bdims_[a];
  }
  buckets_.assign(total, {});
  std::vector<std::size_t> lo(d_), hi(d_), k(d_);
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    for (std::size_t a = 0; a < d_; ++a) {
      lo[a] = static_cast<std::size_t>(std::max(0.0, std::floor((centers_[i][a] - radii_[i] - blo_[a]) / cell)));
      hi[a] = std::min(bdims_[a] - 1,
                       static_cast<std::size_t>(std::max(0.0, std::floor((centers_[i][a] + radii_[i] - blo_[a]) / cell))));
    }
    k = lo;
    while (true) {
      std::size_t b = 0;
      for (std::size_t a = 0; a < d_; ++a) b = b * bdims_[a] + k[a];
      buckets_[b].push_back(i);
      std::size_t a = d_;
      while (a-- > 0) {
        if (k[a] < hi[a]) {
          ++k[a];
          break;
        }
        k[a] = lo[a];
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  }
}

void PartitionBank::candidates(std::span<const double> x, std::vector<std::size_t>& out) const {
  out.clear();
  std::size_t b = 0;
  for (std::size_t a = 0; a < d_; ++a) {
    const double c = std::floor((x[a] - blo_[a]) / bcell_[a]);
    if (c < 0.0 || c >= static_cast<double>(bdims_[a])) return;
    b = b * bdims_[a] + static_cast<std::size_t>(c);
  }
  out = buckets_[b];
}

Box PartitionBank::support_box(std::size_t i) const {
  Box b{std::vector<double>(d_), std::vector<double>(d_)};
  const Box th = theta_.psi.declared_support()->bounding_box();
  for (std::size_t a = 0; a < d_; ++a) {
    b.lo[a] = std::max(centers_[i][a] - radii_[i], th.lo[a]);
    b.hi[a] = std::min(centers_[i][a] + radii_[i], th.hi[a]);
  }
  return b;
}

void PartitionBank::nonzero(int order, std::span<const double> x, SparseBlock& out) const {
  if (order > order_) throw Error(ErrorKind::order, "partition order exceeded");
  const std::size_t w = MultiIndexSet::get(d_, order).size();
  out.reset(w);
  if (theta_.psi.outside_support(x)) return;
  thread_local std::vector<std::size_t> cand;
  candidates(x, cand);
  double z[8];
  if (order == 0) {
    double th;
    theta_.psi.value_unchecked(x, std::span<double>(&th, 1));
    if (th == 0.0) return;
    double S = 0.0;
    const std::size_t first = out.index.size();
    for (std::size_t i : cand) {
      double s = 0.0;
      for (std::size_t a = 0; a < d_; ++a) {
        z[a] = (x[a] - centers_[i][a]) / radii_[i];
        s += z[a] * z[a];
      }
      const double b = bump_profile(0, s);
      if (b == 0.0) continue;
      out.index.push_back(i);
      out.values.push_back(b);
      S += b;
    }
    if (S == 0.0) throw Error(ErrorKind::cover_defect, "bump sum vanishes inside the cut-off support");
    for (std::size_t t = first; t < out.values.size(); ++t) out.values[t] = th * out.values[t] / S;
    return;
  }
  const JetLayout& L = JetLayout::get(d_, order);
  std::vector<double> thb(w);
  theta_.psi.block_unchecked(order, x, thb);
  bool zero = true;
  for (double v : thb) zero = zero && v == 0.0;
  if (zero) return;
  Jet theta(L);
  for (std::size_t b = 0; b < w; ++b) theta.coeff(b) = thb[b] / L.factorial(b);
  thread_local std::vector<Jet> bumps;
  bumps.clear();
  Jet S(L);
  std::vector<double> der(w);
  const auto& set = MultiIndexSet::get(d_, order);
  for (std::size_t i : cand) {
    double s = 0.0;
    for (std::size_t a = 0; a < d_; ++a) {
      z[a] = (x[a] - centers_[i][a]) / radii_[i];
      s += z[a] * z[a];
    }
    if (bump_profile(0, s) == 0.0) continue;
    bump_block(d_, order, std::span<const double>(z, d_), der);
    Jet b(L);
    for (std::size_t k = 0; k < w; ++k) {
      b.coeff(k) = der[k] * std::pow(radii_[i], -static_cast<double>(set[k].order())) / L.factorial(k);
    }
    S += b;
    out.index.push_back(i);
    bumps.push_back(b);
  }
  if (S.value() == 0.0) throw Error(ErrorKind::cover_defect, "bump sum vanishes inside the cut-off support");
  out.values.resize(out.index.size() * w);
  for (std::size_t t = 0; t < bumps.size(); ++t) {
    const Jet phi = theta * bumps[t] / S;
    phi.derivatives(std::span<double>(out.values.data() + t * w, w));
  }
}

ConvolvedBank::ConvolvedBank(std::shared_ptr<const FactorBank> inner, KernelTable table)
    : inner_(std::move(inner)), table_(std::move(table)) {}

void ConvolvedBank::nonzero(int order, std::span<const double> x, SparseBlock& out) const {
  if (order > table_.order) throw Error(ErrorKind::order, "convolved factor order exceeded");
  const std::size_t d = table_.dim;
  const std::size_t w = MultiIndexSet::get(d, order).size();
  out.reset(w);
  thread_local SparseBlock inner;
  thread_local std::unordered_map<std::size_t, std::size_t> slot;
  slot.clear();
  double y[8];
  for (std::size_t q = 0; q < table_.nodes.size(); ++q) {
    for (std::size_t a = 0; a < d; ++a) y[a] = x[a] - table_.nodes[q][a];
    inner_->nonzero(0, std::span<const double>(y, d), inner);
    const double* wq = table_.w.data() + q * table_.width;
    for (std::size_t t = 0; t < inner.size(); ++t) {
      auto [it, fresh] = slot.try_emplace(inner.index[t], out.index.size());
      if (fresh) {
        out.index.push_back(inner.index[t]);
        out.values.resize(out.values.size() + w, 0.0);
      }
      double* o = out.values.data() + it->second * w;
      const double v = inner.values[t];
      for (std::size_t b = 0; b < w; ++b) o[b] += wq[b] * v;
    }
  }
  // ascending factor order
  std::vector<std::size_t> perm(out.index.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return out.index[a] < out.index[b]; });
  SparseBlock sorted;
  sorted.reset(w);
  for (std::size_t p : perm) {
    sorted.index.push_back(out.index[p]);
    sorted.values.insert(sorted.values.end(), out.values.begin() + static_cast<std::ptrdiff_t>(p * w),
                         out.values.begin() + static_cast<std::ptrdiff_t>((p + 1) * w));
  }
  out = std::move(sorted);
}

SampledFunction bank_factor(std::shared_ptr<const FactorBank> bank, std::size_t i, const Region& domain,
                            std::optional<Region> support) {
  auto block = [bank, i](int k, std::span<const double> x, std::span<double> out) {
    thread_local SparseBlock sb;
    bank->nonzero(k, x, sb);
    const std::size_t w = sb.width;
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(w), 0.0);
    for (std::size_t t = 0; t < sb.size(); ++t) {
      if (sb.index[t] != i) continue;
      std::copy(sb.values.begin() + static_cast<std::ptrdiff_t>(t * w),
                sb.values.begin() + static_cast<std::ptrdiff_t>((t + 1) * w), out.begin());
      break;
    }
  };
  auto value = [block](std::span<const double> x, std::span<double> out) { block(0, x, out); };
  return SampledFunction(domain, bank->order(), 1, value, block, std::move(support));
}

namespace {

Region lattice_box(const Region& domain, const Box& b) {
  return Region::on_lattice({b}, {domain.origin().begin(), domain.origin().end()},
                            {domain.step().begin(), domain.step().end()});
}

}  // namespace

std::vector<SampledFunction> build_partition(const Cover& cover, const Region& domain, int max_deriv,
                                             const QuadratureSpec& quad) {
  auto bank = std::make_shared<const PartitionBank>(cover, domain, max_deriv, quad);
  std::vector<SampledFunction> out;
  out.reserve(bank->size());
  for (std::size_t i = 0; i < bank->size(); ++i) {
    out.push_back(bank_factor(bank, i, domain, lattice_box(domain, bank->support_box(i))));
  }
  return out;
}

LocalizationResult finite_rank_c0_approx(const SampledFunction& f, const WeightFamily& fam, int j,
                                         const SeminormIndex& alpha, double eps,
                                         const std::optional<Region>& support_constraint, const QuadratureSpec& quad,
                                         int max_deriv, const CoverOptions& cover_opt) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  const Region& dom = f.domain();
  const std::size_t m = f.value_dim();
  const WeightIndex idx{j, 0};
  Region search = dom;
  if (support_constraint) {
    search = eroded(Region::on_lattice(support_constraint->boxes(), {dom.origin().begin(), dom.origin().end()},
                                       {dom.step().begin(), dom.step().end()}),
                    dom.max_step());
    if (search.empty()) throw Error(ErrorKind::geometry, "support constraint too thin for the grid");
  }
  TailCompact tc = find_tail_compact(f, fam, idx, alpha, eps, 2.0 * dom.max_step(), search);
  CoverOptions copt = cover_opt;
  copt.support_constraint = support_constraint;
  Cover cover = oscillation_cover(f, tc.K, fam, j, alpha, eps, copt);
  auto bank = std::make_shared<const PartitionBank>(cover, dom, max_deriv, quad);

  std::vector<SampledFunction> factors;
  std::vector<std::vector<double>> vectors;
  factors.reserve(bank->size());
  vectors.reserve(bank->size());
  for (std::size_t i = 0; i < bank->size(); ++i) {
    factors.push_back(bank_factor(bank, i, dom, lattice_box(dom, bank->support_box(i))));
    std::vector<double> e(m);
    f.value_unchecked(cover.centers[i], e);
    vectors.push_back(std::move(e));
  }
  FiniteRankFunction g(dom, m, max_deriv, std::move(factors), std::move(vectors), bank);

  LocalizationResult res{std::move(g), bank, std::move(cover), {}};
  auto& rep = res.report;
  rep.n_centers = res.cover.size();
  rep.rank = res.g.rank();
  rep.N_const = res.cover.N_const;
  rep.eps = eps;
  rep.refine = res.cover.refine;
  rep.K = tc.K;
  rep.tail = std::move(tc);
  const SampledFunction diff = linear_combination(1.0, f, -1.0, res.g.as_function());
  rep.measured_error = weighted_sup(diff, dom.grid(), fam, idx, alpha).value;
  rep.four_eps_bound_ok = rep.measured_error < 4.0 * eps;
  return res;
}

}  // namespace cvapprox
