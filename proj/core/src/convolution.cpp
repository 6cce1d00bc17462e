#include "cvapprox/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvapprox/error.hpp"

namespace cvapprox {

namespace {

Box support_box_of(const SampledFunction& f) {
  const auto& s = f.declared_support();
  if (!s) throw Error(ErrorKind::precondition, "factor has no declared support");
  if (s->empty()) return Box{std::vector<double>(f.dim(), 0.0), std::vector<double>(f.dim(), 0.0)};
  return s->bounding_box();
}

double box_volume(const Box& b) {
  double v = 1.0;
  for (std::size_t a = 0; a < b.dim(); ++a) v *= b.hi[a] - b.lo[a];
  return v;
}

}  // namespace

IntegrationTable integration_table(const SampledFunction& a, const QuadratureSpec& quad) {
  quad.validate();
  if (a.value_dim() != 1) throw Error(ErrorKind::precondition, "integration factor must be scalar");
  IntegrationTable t;
  t.dim = a.dim();
  t.order = a.order();
  t.width = MultiIndexSet::get(t.dim, t.order).size();
  t.nodes = PointSet(t.dim);
  t.support_box = support_box_of(a);
  if (a.declared_support()->empty()) return t;
  std::vector<double> blk(t.width);
  for (const auto& box : a.declared_support()->boxes()) {
    if (box_volume(box) <= 0.0) continue;
    const TensorRule r = tensor_rule(quad.rule, quad.points_per_axis, box);
    for (std::size_t q = 0; q < r.weights.size(); ++q) {
      a.block_unchecked(t.order, r.nodes[q], blk);
      bool zero = true;
      for (double v : blk) zero = zero && v == 0.0;
      if (zero) continue;
      t.nodes.push_back(r.nodes[q]);
      for (double v : blk) t.w.push_back(r.weights[q] * v);
    }
  }
  return t;
}

IntegrationTable integration_table(const KernelTable& k, double radius) {
  IntegrationTable t;
  t.dim = k.dim;
  t.order = k.order;
  t.width = k.width;
  t.nodes = k.nodes;
  t.w = k.w;
  t.support_box = Box{std::vector<double>(k.dim, -radius), std::vector<double>(k.dim, radius)};
  return t;
}

SampledFunction convolve_with_table(std::shared_ptr<const IntegrationTable> table, const SampledFunction& b) {
  const std::size_t d = b.dim();
  if (table->dim != d) throw Error(ErrorKind::precondition, "dimension mismatch in convolution");
  const std::size_t m = b.value_dim();
  double reach = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    reach = std::max({reach, std::abs(table->support_box.lo[a]), std::abs(table->support_box.hi[a])});
  }
  auto block = [table, b, m, d](int k, std::span<const double> x, std::span<double> out) {
    const std::size_t nb = MultiIndexSet::get(d, k).size();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nb * m), 0.0);
    double y[8];
    thread_local std::vector<double> val;
    val.resize(m);
    const auto& nodes = table->nodes;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto z = nodes[q];
      for (std::size_t a = 0; a < d; ++a) y[a] = x[a] - z[a];
      const std::span<const double> ys(y, d);
      if (b.outside_support(ys)) continue;
      b.value_unchecked(ys, val);
      const double* wq = table->w.data() + q * table->width;
      for (std::size_t bi = 0; bi < nb; ++bi) {
        const double w = wq[bi];
        for (std::size_t c = 0; c < m; ++c) out[bi * m + c] += w * val[c];
      }
    }
  };
  auto value = [block](std::span<const double> x, std::span<double> out) { block(0, x, out); };
  std::optional<Region> support;
  const Region domain = b.domain().inflated(reach);
  if (b.declared_support()) {
    if (b.declared_support()->empty() || table->nodes.empty()) {
      support = Region{};
    } else {
      std::vector<Box> boxes;
      for (const auto& sb : b.declared_support()->boxes()) {
        Box s = sb;
        for (std::size_t a = 0; a < d; ++a) {
          s.lo[a] += table->support_box.lo[a];
          s.hi[a] += table->support_box.hi[a];
        }
        boxes.push_back(std::move(s));
      }
      support = Region::on_lattice(std::move(boxes), {domain.origin().begin(), domain.origin().end()},
                                   {domain.step().begin(), domain.step().end()});
    }
  }
  return SampledFunction(domain, table->order, m, value, block, std::move(support));
}

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g, const QuadratureSpec& quad) {
  if (g.value_dim() != 1) throw Error(ErrorKind::precondition, "second convolution factor must be scalar");
  if (f.dim() != g.dim()) throw Error(ErrorKind::precondition, "dimension mismatch in convolution");
  const bool fc = f.declared_support().has_value();
  const bool gc = g.declared_support().has_value();
  if (!fc && !gc) throw Error(ErrorKind::precondition, "convolution needs one compactly supported factor");
  if ((fc && f.declared_support()->empty()) || (gc && g.declared_support()->empty())) {
    return zero_function(f.domain(), std::max(f.order(), g.order()), f.value_dim());
  }
  bool on_g = gc;
  if (fc && gc) on_g = box_volume(support_box_of(g)) <= box_volume(support_box_of(f));
  if (on_g) return convolve_with_table(std::make_shared<const IntegrationTable>(integration_table(g, quad)), f);
  // f carries the quadrature: (f*g)(x) = sum_q w_q f(y_q) g(x - y_q), one scalar table per coordinate
  if (f.value_dim() == 1) {
    return convolve_with_table(std::make_shared<const IntegrationTable>(integration_table(f, quad)), g);
  }
  const std::size_t m = f.value_dim();
  std::vector<SampledFunction> parts;
  for (std::size_t c = 0; c < m; ++c) {
    auto comp_value = [f, c, m](std::span<const double> x, std::span<double> out) {
      std::vector<double> v(m);
      f.value_unchecked(x, v);
      out[0] = v[c];
    };
    auto comp_block = [f, c, m](int k, std::span<const double> x, std::span<double> out) {
      std::vector<double> v(f.block_size(k));
      f.block_unchecked(k, x, v);
      for (std::size_t b = 0; b < v.size() / m; ++b) out[b] = v[b * m + c];
    };
    const SampledFunction fc1(f.domain(), f.order(), 1, comp_value, comp_block, f.declared_support());
    parts.push_back(convolve_with_table(std::make_shared<const IntegrationTable>(integration_table(fc1, quad)), g));
  }
  const SampledFunction& p0 = parts.front();
  auto value = [parts, m](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < m; ++c) parts[c].value_unchecked(x, out.subspan(c, 1));
  };
  auto block = [parts, m](int k, std::span<const double> x, std::span<double> out) {
    const std::size_t nb = parts.front().block_size(k);
    std::vector<double> tmp(nb);
    for (std::size_t c = 0; c < m; ++c) {
      parts[c].block_unchecked(k, x, tmp);
      for (std::size_t b = 0; b < nb; ++b) out[b * m + c] = tmp[b];
    }
  };
  return SampledFunction(p0.domain(), p0.order(), m, value, block, p0.declared_support());
}

double commutativity_check(const SampledFunction& f, const SampledFunction& g, const QuadratureSpec& quad,
                           const PointSet& sample_points) {
  const SampledFunction fg = convolve(f, g, quad);
  const std::size_t m = f.value_dim();
  const std::size_t d = f.dim();
  const QuadratureSpec alt = quad.alternate();
  // second orientation: integrate over the other variable, y = x - z with z over the compact support
  const bool g_compact = g.declared_support().has_value();
  const Box sb = g_compact ? support_box_of(g) : support_box_of(f);
  const TensorRule r = tensor_rule(alt.rule, alt.points_per_axis, sb);
  double worst = 0.0;
  std::vector<double> lhs(m), fv(m), y(d);
  for (std::size_t p = 0; p < sample_points.size(); ++p) {
    const auto x = sample_points[p];
    fg.value_unchecked(x, lhs);
    std::vector<double> rhs(m, 0.0);
    for (std::size_t q = 0; q < r.weights.size(); ++q) {
      const auto z = r.nodes[q];
      for (std::size_t a = 0; a < d; ++a) y[a] = x[a] - z[a];
      double gv = 0.0;
      if (g_compact) {
        // (g*f)(x) = int g(z) f(x - z) dz
        g.value_unchecked(z, std::span<double>(&gv, 1));
        if (gv == 0.0) continue;
        f.value_unchecked(y, fv);
      } else {
        // (g*f)(x) = int g(x - z) f(z) dz
        g.value_unchecked(y, std::span<double>(&gv, 1));
        if (gv == 0.0) continue;
        f.value_unchecked(z, fv);
      }
      for (std::size_t c = 0; c < m; ++c) rhs[c] += r.weights[q] * gv * fv[c];
    }
    for (std::size_t c = 0; c < m; ++c) worst = std::max(worst, std::abs(lhs[c] - rhs[c]));
  }
  return worst;
}

TransferReport derivative_transfer_check(const SampledFunction& f, const Mollifier& moll, const MultiIndex& beta,
                                         const PointSet& sample_points, const QuadratureSpec& quad, double fd_step) {
  if (beta.order() > std::min(f.order(), moll.max_deriv())) {
    throw Error(ErrorKind::order, "transfer check order exceeds the proven range");
  }
  const int k = beta.order();
  const std::size_t d = f.dim();
  const std::size_t m = f.value_dim();
  const KernelTable kt = kernel_table(moll, quad, k);
  const SampledFunction conv =
      convolve_with_table(std::make_shared<const IntegrationTable>(integration_table(kt, moll.radius())), f);
  const auto& set = MultiIndexSet::get(d, k);
  const std::size_t bi = set.index_of(beta);
  TransferReport rep;
  std::vector<double> a(m), b(set.size() * m), c(m, 0.0), fb(f.block_size(k)), y(d);
  for (std::size_t p = 0; p < sample_points.size(); ++p) {
    const auto x = sample_points[p];
    // (a)
    if (k == 0) {
      conv.value_unchecked(x, a);
    } else {
      SampledFunction::ValueFn v = [&conv](std::span<const double> z, std::span<double> o) {
        conv.value_unchecked(z, o);
      };
      const SampledFunction probe(conv.domain(), 0, m, v);
      a = fd_derivative_oracle(probe, beta, x, fd_step);
    }
    // (b)
    conv.block_unchecked(k, x, b);
    // (c)
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t q = 0; q < kt.nodes.size(); ++q) {
      for (std::size_t ax = 0; ax < d; ++ax) y[ax] = x[ax] - kt.nodes[q][ax];
      if (f.outside_support(y)) continue;
      f.block_unchecked(k, y, fb);
      const double w = kt.w[q * kt.width];
      for (std::size_t cc = 0; cc < m; ++cc) c[cc] += w * fb[bi * m + cc];
    }
    for (std::size_t cc = 0; cc < m; ++cc) {
      const double bv = b[bi * m + cc];
      rep.fd_vs_kernel = std::max(rep.fd_vs_kernel, std::abs(a[cc] - bv));
      rep.fd_vs_function = std::max(rep.fd_vs_function, std::abs(a[cc] - c[cc]));
      rep.kernel_vs_function = std::max(rep.kernel_vs_function, std::abs(bv - c[cc]));
      rep.scale = std::max({rep.scale, std::abs(a[cc]), std::abs(bv), std::abs(c[cc])});
    }
  }
  return rep;
}

SampledFunction regularize(const SampledFunction& f, const Mollifier& moll, const QuadratureSpec& quad) {
  if (!f.declared_support()) throw Error(ErrorKind::precondition, "regularization needs a compactly supported function");
  const KernelTable kt = kernel_table(moll, quad, moll.max_deriv());
  return convolve_with_table(std::make_shared<const IntegrationTable>(integration_table(kt, moll.radius())), f);
}

SampledFunction regularize(const SampledFunction& f, int n, const QuadratureSpec& quad, int max_deriv) {
  return regularize(f, build_mollifier(f.dim(), n, quad, max_deriv), quad);
}

RegularizationOrder find_regularization_order(const SampledFunction& f, const WeightFamily& fam,
                                              const WeightIndex& idx, const SeminormIndex& alpha, double eps,
                                              int n_max, const QuadratureSpec& quad) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  if (idx.l > f.order()) throw Error(ErrorKind::order, "seminorm order exceeds function order");
  RegularizationOrder out;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= n_max; n *= 2) {
    const SampledFunction fr = regularize(f, n, quad, idx.l);
    const SampledFunction diff = linear_combination(1.0, f, -1.0, fr.with_support(std::nullopt));
    const double v = weighted_sup(diff, f.domain().grid(), fam, idx, alpha).value;
    out.history.emplace_back(n, v);
    best = std::min(best, v);
    if (v < eps) {
      out.n = n;
      out.value = v;
      return out;
    }
  }
  throw Error(ErrorKind::convergence_failure, "regularization did not reach the target by n_max", best);
}

}  // namespace cvapprox
