#include "cvapprox/mollifier.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "cvapprox/error.hpp"

namespace cvapprox {

namespace {

constexpr double kEdge = 1.0 - 1e-8;
constexpr int kMaxProfile = 2 * Mollifier::kMaxDeriv + 1;

// h^(k)(s) = P_k(u) h(s), u = 1/(1-s); P_{k+1} = u^2 (P_k' - P_k).
const std::vector<std::vector<double>>& profile_polys() {
  static const std::vector<std::vector<double>> polys = [] {
    std::vector<std::vector<double>> p{{1.0}};
    for (int k = 0; k < kMaxProfile; ++k) {
      const auto& cur = p.back();
      std::vector<double> next(cur.size() + 2, 0.0);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (i > 0) next[i - 1 + 2] += static_cast<double>(i) * cur[i];
        next[i + 2] -= cur[i];
      }
      p.push_back(std::move(next));
    }
    return p;
  }();
  return polys;
}

}  // namespace

double bump_profile(int k, double s) {
  if (s >= kEdge) return 0.0;
  if (k < 0 || k > kMaxProfile) throw Error(ErrorKind::order, "bump profile derivative order out of range");
  const double u = 1.0 / (1.0 - s);
  const double h = std::exp(-u);
  if (k == 0) return h;
  const auto& p = profile_polys()[static_cast<std::size_t>(k)];
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc * h;
}

namespace {

// sum over k_a in [ceil(beta_a/2), beta_a] of h^(sum k)(s) prod_a C(k_a, beta_a-k_a)(2z_a)^(2k_a-beta_a)/k_a!
double bump_derivative_impl(std::span<const int> beta, std::span<const double> z, double s,
                            std::span<const double> hk) {
  const std::size_t d = beta.size();
  std::vector<int> lo(d), k(d);
  for (std::size_t a = 0; a < d; ++a) {
    lo[a] = (beta[a] + 1) / 2;
    k[a] = lo[a];
  }
  (void)s;
  double total = 0.0;
  while (true) {
    double term = 1.0;
    int ksum = 0;
    for (std::size_t a = 0; a < d; ++a) {
      double f = 1.0;
      for (int i = 2; i <= k[a]; ++i) f *= i;
      term *= binomial(k[a], beta[a] - k[a]) * std::pow(2.0 * z[a], 2 * k[a] - beta[a]) / f;
      ksum += k[a];
    }
    total += term * hk[static_cast<std::size_t>(ksum)];
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++k[a] <= beta[a]) break;
      k[a] = lo[a];
    }
    if (a == d) break;
  }
  double bf = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (int i = 2; i <= beta[a]; ++i) bf *= i;
  }
  return bf * total;
}

double norm2(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

}  // namespace

double bump_derivative(const MultiIndex& beta, std::span<const double> z) {
  const double s = norm2(z);
  if (s >= kEdge) return 0.0;
  const int ord = beta.order();
  std::vector<double> hk(static_cast<std::size_t>(ord + 1));
  for (int k = 0; k <= ord; ++k) hk[static_cast<std::size_t>(k)] = bump_profile(k, s);
  return bump_derivative_impl(beta.components(), z, s, hk);
}

void bump_block(std::size_t dim, int order, std::span<const double> z, std::span<double> out) {
  const auto& set = MultiIndexSet::get(dim, order);
  const double s = norm2(z);
  if (s >= kEdge) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(set.size()), 0.0);
    return;
  }
  double hk[kMaxProfile + 1];
  for (int k = 0; k <= order; ++k) hk[k] = bump_profile(k, s);
  const std::span<const double> hs(hk, static_cast<std::size_t>(order + 1));
  out[0] = hk[0];
  for (std::size_t b = 1; b < set.size(); ++b) out[b] = bump_derivative_impl(set[b].components(), z, s, hs);
}

Mollifier::Mollifier(std::size_t dim, int n, int max_deriv, double normC, MassCheck mass)
    : d_(dim), n_(n), max_deriv_(max_deriv), C_(normC), scale_d_(std::pow(static_cast<double>(n), dim)), mass_(mass) {
  if (n < 1) throw Error(ErrorKind::precondition, "mollifier scale must be >= 1");
  if (max_deriv < 0 || max_deriv > kMaxDeriv) throw Error(ErrorKind::order, "mollifier derivative order must be <= 6");
}

double Mollifier::unit_value(std::span<const double> z) const {
  const double s = norm2(z);
  return s >= kEdge ? 0.0 : C_ * bump_profile(0, s);
}

double Mollifier::value(std::span<const double> x) const {
  double z[8];
  for (std::size_t a = 0; a < d_; ++a) z[a] = n_ * x[a];
  return scale_d_ * unit_value(std::span<const double>(z, d_));
}

double Mollifier::derivative(const MultiIndex& beta, std::span<const double> x) const {
  if (beta.order() > max_deriv_) throw Error(ErrorKind::order, "mollifier derivative order exceeded");
  double z[8];
  for (std::size_t a = 0; a < d_; ++a) z[a] = n_ * x[a];
  if (beta.order() == 0) return scale_d_ * unit_value(std::span<const double>(z, d_));
  return scale_d_ * std::pow(static_cast<double>(n_), beta.order()) * C_ *
         bump_derivative(beta, std::span<const double>(z, d_));
}

void Mollifier::block(int order, std::span<const double> x, std::span<double> out) const {
  if (order > max_deriv_) throw Error(ErrorKind::order, "mollifier derivative order exceeded");
  const auto& set = MultiIndexSet::get(d_, order);
  double z[8];
  for (std::size_t a = 0; a < d_; ++a) z[a] = n_ * x[a];
  bump_block(d_, order, std::span<const double>(z, d_), out);
  for (std::size_t b = 0; b < set.size(); ++b) {
    out[b] *= scale_d_ * std::pow(static_cast<double>(n_), set[b].order()) * C_;
  }
  out[0] = scale_d_ * unit_value(std::span<const double>(z, d_));
}

SampledFunction Mollifier::as_function(const Region& domain) const {
  const Mollifier self = *this;
  auto value = [self](std::span<const double> x, std::span<double> out) { out[0] = self.value(x); };
  auto block = [self](int k, std::span<const double> x, std::span<double> out) { self.block(k, x, out); };
  const double r = radius();
  Box b{std::vector<double>(d_, -r), std::vector<double>(d_, r)};
  auto support = Region::on_lattice({b}, {domain.origin().begin(), domain.origin().end()},
                                    {domain.step().begin(), domain.step().end()});
  return SampledFunction(domain, max_deriv_, 1, value, block, std::move(support));
}

namespace {

double unit_integral(std::size_t dim, QuadratureSpec::Rule rule, int n) {
  const Box box{std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)};
  const TensorRule t = tensor_rule(rule, n, box);
  double s = 0.0;
  for (std::size_t q = 0; q < t.weights.size(); ++q) s += t.weights[q] * bump_profile(0, norm2(t.nodes[q]));
  return s;
}

}  // namespace

double mollifier_normalization(std::size_t dim, const QuadratureSpec& quad) {
  quad.validate();
  using Key = std::tuple<std::size_t, int, int, int, double>;
  static std::mutex mu;
  static std::map<Key, double> cache;
  const Key key{dim, static_cast<int>(quad.rule), quad.points_per_axis, quad.refinement_levels, quad.tol};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // at least the requested refinement checks, a few more if still moving
  constexpr int kExtraLevels = 4;
  int n = quad.points_per_axis;
  double prev = unit_integral(dim, quad.rule, n);
  double cur = prev;
  double gap = std::numeric_limits<double>::infinity();
  for (int lv = 0; lv < std::max(1, quad.refinement_levels) + kExtraLevels; ++lv) {
    n *= 2;
    cur = unit_integral(dim, quad.rule, n);
    gap = std::abs(cur - prev);
    if (gap < quad.tol) break;
    prev = cur;
  }
  if (!(gap < quad.tol)) {
    throw Error(ErrorKind::quadrature_convergence, "mollifier normalization did not converge", gap);
  }
  const double C = 1.0 / cur;
  std::lock_guard lock(mu);
  cache.emplace(key, C);
  return C;
}

Mollifier build_mollifier(std::size_t dim, int n, const QuadratureSpec& quad, int max_deriv) {
  if (n < 1) throw Error(ErrorKind::precondition, "mollifier scale must be >= 1");
  const double C = mollifier_normalization(dim, quad);
  Mollifier probe(dim, n, max_deriv, C, {});
  const double r = probe.radius();
  const Box box{std::vector<double>(dim, -r), std::vector<double>(dim, r)};
  auto mass_at = [&](int pts) {
    const TensorRule t = tensor_rule(quad.rule, pts, box);
    double s = 0.0;
    for (std::size_t q = 0; q < t.weights.size(); ++q) s += t.weights[q] * probe.value(t.nodes[q]);
    return s;
  };
  MassCheck mass;
  mass.levels = quad.refinement_levels;
  mass.base = mass_at(quad.points_per_axis);
  mass.refined = mass_at(quad.points_per_axis << quad.refinement_levels);
  return Mollifier(dim, n, max_deriv, C, mass);
}

KernelTable kernel_table(const Mollifier& moll, QuadratureSpec::Rule rule, int points, int order) {
  if (order > moll.max_deriv()) throw Error(ErrorKind::order, "kernel order exceeds mollifier order");
  const std::size_t d = moll.dim();
  const double r = moll.radius();
  const Box box{std::vector<double>(d, -r), std::vector<double>(d, r)};
  const TensorRule t = tensor_rule(rule, points, box);
  KernelTable k;
  k.dim = d;
  k.order = order;
  k.width = MultiIndexSet::get(d, order).size();
  k.nodes = PointSet(d);
  k.abs_sum.assign(k.width, 0.0);
  std::vector<double> blk(k.width);
  for (std::size_t q = 0; q < t.weights.size(); ++q) {
    const auto y = t.nodes[q];
    if (norm2(y) * moll.scale() * moll.scale() >= kEdge) continue;
    moll.block(order, y, blk);
    k.nodes.push_back(y);
    k.weights.push_back(t.weights[q]);
    for (std::size_t b = 0; b < k.width; ++b) {
      const double v = t.weights[q] * blk[b];
      k.w.push_back(v);
      k.abs_sum[b] += std::abs(v);
    }
  }
  return k;
}

KernelTable kernel_table(const Mollifier& moll, const QuadratureSpec& quad, int order) {
  return kernel_table(moll, quad.rule, quad.points_per_axis, order);
}

}  // namespace cvapprox
