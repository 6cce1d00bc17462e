#include "cvapprox/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cvapprox/error.hpp"
#include "cvapprox/jet.hpp"
#include "cvapprox/mollifier.hpp"

namespace cvapprox {

namespace {

// Cumulative integral of exp(-1/(1-t^2)) over [-1, t] on a fine grid of
// [-1, 0]; the right half comes from symmetry so R(0) = 1/2 exactly.
struct StepTable {
  static constexpr int kIntervals = 4096;
  double C = 0.0;
  std::vector<double> R;  // R at -1 + i / kIntervals
  StepTable() {
    const Rule1D g = gauss_legendre(8);
    const double h = 1.0 / kIntervals;
    std::vector<double> I(kIntervals + 1, 0.0);
    for (int i = 0; i < kIntervals; ++i) {
      const double a = -1.0 + i * h;
      double s = 0.0;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double t = a + 0.5 * h * (g.nodes[q] + 1.0);
        s += g.weights[q] * bump_profile(0, t * t);
      }
      I[i + 1] = I[i] + 0.5 * h * s;
    }
    C = 0.5 / I.back();
    R.resize(I.size());
    for (std::size_t i = 0; i < I.size(); ++i) R[i] = C * I[i];
    R.back() = 0.5;
  }
};

const StepTable& table() {
  static const StepTable t;
  return t;
}

double rho1(int k, double t) {
  const double z[1] = {t};
  return table().C * bump_derivative(MultiIndex{std::vector<int>{k}}, z);
}

// left half only, t in [-1, 0]
double step_left(double t) {
  const auto& tb = table();
  const double h = 1.0 / StepTable::kIntervals;
  const double u = (t + 1.0) / h;
  int i = static_cast<int>(std::floor(u));
  i = std::clamp(i, 0, StepTable::kIntervals - 1);
  const double s = u - i;
  const double t0 = -1.0 + i * h;
  const double t1 = t0 + h;
  const double p0 = tb.R[i], p1 = tb.R[i + 1];
  const double m0 = rho1(0, t0) * h, m1 = rho1(0, t1) * h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
}

}  // namespace

double mollified_step(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double v = t <= 0.0 ? step_left(t) : 1.0 - step_left(-t);
  return std::clamp(v, 0.0, 1.0);
}

double mollified_step_derivative(int k, double t) {
  if (k == 0) return mollified_step(t);
  return rho1(k - 1, t);
}

double mollified_step_normalization() { return table().C; }

double CutoffFunction::C(const MultiIndex& beta) const {
  const auto& set = MultiIndexSet::get(K.dim(), max_deriv);
  const std::size_t i = set.index_of(beta);
  if (i == MultiIndexSet::npos) throw Error(ErrorKind::order, "cut-off table does not cover " + beta.str());
  return Cbeta[i];
}

namespace {

struct CutoffShape {
  std::size_t d = 0;
  double n = 0.0;
  std::vector<Box> inner;    // the boxes inflated by axis_delta / 2 (the mollified indicators)
  std::vector<Box> support;  // inner inflated by 1 / n
};

// derivatives 0..k of t -> R(n (t - a)) - R(n (t - b))
void axis_derivs(const CutoffShape& s, double x, double a, double b, int k, double* out) {
  out[0] = mollified_step(s.n * (x - a)) - mollified_step(s.n * (x - b));
  double nk = 1.0;
  for (int r = 1; r <= k; ++r) {
    nk *= s.n;
    out[r] = nk * (rho1(r - 1, s.n * (x - a)) - rho1(r - 1, s.n * (x - b)));
  }
}

double psi_value(const CutoffShape& s, std::span<const double> x) {
  double prod = 1.0;
  for (std::size_t bi = 0; bi < s.inner.size(); ++bi) {
    if (!s.support[bi].contains(x)) continue;
    double pb = 1.0;
    for (std::size_t a = 0; a < s.d && pb != 0.0; ++a) {
      pb *= mollified_step(s.n * (x[a] - s.inner[bi].lo[a])) - mollified_step(s.n * (x[a] - s.inner[bi].hi[a]));
    }
    prod *= 1.0 - pb;
  }
  return std::clamp(1.0 - prod, 0.0, 1.0);
}

void psi_block(const CutoffShape& s, int k, std::span<const double> x, std::span<double> out) {
  const JetLayout& L = JetLayout::get(s.d, k);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(L.size()), 0.0);
  Jet prod(L, 1.0);
  bool any = false;
  double der[JetLayout::kMaxCoeffs];
  for (std::size_t bi = 0; bi < s.inner.size(); ++bi) {
    if (!s.support[bi].contains(x)) continue;
    Jet pb(L, 1.0);
    for (std::size_t a = 0; a < s.d; ++a) {
      axis_derivs(s, x[a], s.inner[bi].lo[a], s.inner[bi].hi[a], k, der);
      pb = pb * Jet::variable(L, x[a], a).compose(std::span<const double>(der, static_cast<std::size_t>(k) + 1));
    }
    prod = prod * (1.0 - pb);
    any = true;
  }
  if (!any) return;
  const Jet psi = 1.0 - prod;
  psi.derivatives(out);
  out[0] = std::clamp(out[0], 0.0, 1.0);
}

}  // namespace

CutoffFunction build_cutoff(const Region& domain, const Region& K, double delta, int max_deriv,
                            const QuadratureSpec& quad) {
  quad.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::precondition, "delta must be positive");
  if (K.empty()) throw Error(ErrorKind::precondition, "cut-off needs a non-empty compact");
  if (max_deriv < 0) throw Error(ErrorKind::order, "negative derivative order");
  if (!domain.contains(K.inflated(delta))) {
    throw Error(ErrorKind::geometry, "compact inflated by delta leaves the gridded domain");
  }
  const std::size_t d = domain.dim();
  CutoffFunction cut;
  cut.K = K;
  cut.delta = delta;
  cut.axis_delta = delta / std::sqrt(static_cast<double>(d));
  cut.n = static_cast<int>(std::ceil(4.0 / cut.axis_delta - 1e-12));
  cut.max_deriv = max_deriv;
  cut.normalization_gap = std::abs(mollified_step_normalization() - mollifier_normalization(1, quad));

  auto shape = std::make_shared<CutoffShape>();
  shape->d = d;
  shape->n = cut.n;
  for (const auto& b : K.boxes()) {
    shape->inner.push_back(b.inflated(0.5 * cut.axis_delta));
    shape->support.push_back(b.inflated(0.5 * cut.axis_delta + 1.0 / cut.n));
  }
  auto value = [shape](std::span<const double> x, std::span<double> out) { out[0] = psi_value(*shape, x); };
  auto block = [shape](int k, std::span<const double> x, std::span<double> out) { psi_block(*shape, k, x, out); };
  Region support = Region::on_lattice(shape->support, {domain.origin().begin(), domain.origin().end()},
                                      {domain.step().begin(), domain.step().end()});
  cut.psi = SampledFunction(domain, max_deriv, 1, value, block, std::move(support));

  cut.Cbeta = measure_cbeta(cut, domain.grid());
  return cut;
}

std::vector<double> measure_cbeta(const CutoffFunction& cut, const PointSet& pts) {
  const auto& set = MultiIndexSet::get(cut.psi.dim(), cut.max_deriv);
  std::vector<double> sup(set.size(), 0.0), blk(set.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (cut.psi.outside_support(pts[p])) continue;
    cut.psi.block_unchecked(cut.max_deriv, pts[p], blk);
    for (std::size_t b = 0; b < set.size(); ++b) sup[b] = std::max(sup[b], std::abs(blk[b]));
  }
  for (std::size_t b = 0; b < set.size(); ++b) sup[b] *= std::pow(cut.delta, set[b].order());
  return sup;
}

double cutoff_constant(const CutoffFunction& cut, int l) {
  if (l < 0 || l > cut.max_deriv) throw Error(ErrorKind::order, "cut-off table does not reach order " + std::to_string(l));
  const std::size_t d = cut.psi.dim();
  const auto& set = MultiIndexSet::get(d, l);
  double best = 0.0;
  for (std::size_t bi = 0; bi < set.size(); ++bi) {
    double s = 0.0;
    for (std::size_t gi = 0; gi < set.size(); ++gi) {
      if (!set[gi].le(set[bi])) continue;
      const MultiIndex rest = set[bi] - set[gi];
      s += static_cast<double>(multiindex_binom(set[bi], set[gi])) * cut.C(rest) *
           std::pow(cut.delta, -static_cast<double>(rest.order()));
    }
    best = std::max(best, s);
  }
  return best;
}

CutoffResult apply_cutoff(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                          const SeminormIndex& alpha, double eps, double delta, const Region& search,
                          const QuadratureSpec& quad, double initial_constant) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  const int order = std::max(f.order(), idx.l);
  double C = initial_constant;
  constexpr int kMaxIterations = 4;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double target = eps / (1.0 + C);
    TailCompact tc = find_tail_compact(f, fam, idx, alpha, target, delta, search);
    if (tc.K.empty()) throw Error(ErrorKind::criterion_failure, "tail compact is empty", tc.tail.value);
    CutoffFunction cut = build_cutoff(f.domain(), tc.K, delta, order, quad);
    const double C_new = cutoff_constant(cut, idx.l);
    const double bound = (1.0 + C_new) * tc.tail.value;
    if (bound < eps) {
      CutoffResult r;
      r.f_tilde = multiply(cut.psi, f);
      r.report.tail = std::move(tc);
      r.report.C_l_delta = C_new;
      r.report.target = target;
      r.report.bound = bound;
      r.report.iterations = it;
      const SampledFunction diff = linear_combination(1.0, f, -1.0, r.f_tilde);
      r.report.measured = weighted_seminorm(diff, fam, idx, alpha).value;
      r.cut = std::move(cut);
      return r;
    }
    C = std::max(C, C_new);
  }
  throw Error(ErrorKind::criterion_failure, "cut-off constant did not settle", eps / (1.0 + C));
}

}  // namespace cvapprox
