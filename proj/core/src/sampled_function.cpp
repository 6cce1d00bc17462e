#include "cvapprox/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include "cvapprox/error.hpp"

namespace cvapprox {

SampledFunction::SampledFunction(Region domain, int order, std::size_t value_dim, ValueFn value, BlockFn block,
                                 std::optional<Region> support)
    : domain_(std::move(domain)),
      order_(order),
      m_(value_dim),
      value_(std::move(value)),
      block_(std::move(block)),
      support_(std::move(support)) {
  if (domain_.empty()) throw Error(ErrorKind::precondition, "function domain must be non-empty");
  if (order_ < 0) throw Error(ErrorKind::precondition, "function order must be non-negative");
  if (m_ == 0) throw Error(ErrorKind::precondition, "value dimension must be positive");
  if (!value_) throw Error(ErrorKind::precondition, "function needs an evaluator");
  provider_ = block_ ? Provider::analytic : Provider::finite_difference;
  fd_h_ = 0.5 * domain_.min_step();
  if (support_) {
    if (!support_->empty() && support_->dim() != domain_.dim()) {
      throw Error(ErrorKind::precondition, "support dimension mismatch");
    }
    for (const auto& b : support_->boxes()) support_boxes_.push_back(b.inflated(1e-12 * domain_.max_step()));
  }
}

std::size_t SampledFunction::block_size(int order) const {
  return MultiIndexSet::get(dim(), order).size() * m_;
}

bool SampledFunction::outside_support(std::span<const double> x) const {
  if (!support_) return false;
  for (const auto& b : support_boxes_) {
    if (b.contains(x)) return false;
  }
  return true;
}

void SampledFunction::check_point(std::span<const double> x) const {
  if (x.size() != dim()) throw Error(ErrorKind::domain, "point has wrong dimension");
  if (!domain_.contains(x)) throw Error(ErrorKind::domain, "point outside function domain");
}

std::vector<double> SampledFunction::value(std::span<const double> x) const {
  check_point(x);
  std::vector<double> out(m_);
  value_(x, out);
  return out;
}

std::vector<double> SampledFunction::evaluate(const MultiIndex& beta, std::span<const double> x) const {
  if (beta.dim() != dim()) throw Error(ErrorKind::order, "multi-index dimension mismatch");
  if (beta.order() > order_) {
    throw Error(ErrorKind::order, "derivative order " + std::to_string(beta.order()) + " exceeds function order " +
                                      std::to_string(order_));
  }
  check_point(x);
  const int k = beta.order();
  const auto& set = MultiIndexSet::get(dim(), k);
  std::vector<double> blk(set.size() * m_);
  block_unchecked(k, x, blk);
  const std::size_t b = set.index_of(beta);
  return {blk.begin() + static_cast<std::ptrdiff_t>(b * m_), blk.begin() + static_cast<std::ptrdiff_t>((b + 1) * m_)};
}

void SampledFunction::block(int order, std::span<const double> x, std::span<double> out) const {
  if (order > order_) throw Error(ErrorKind::order, "derivative order exceeds function order");
  check_point(x);
  if (out.size() < block_size(order)) throw Error(ErrorKind::precondition, "output block too small");
  block_unchecked(order, x, out);
}

void SampledFunction::block_unchecked(int order, std::span<const double> x, std::span<double> out) const {
  if (outside_support(x)) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(block_size(order)), 0.0);
    return;
  }
  if (order == 0) {
    value_(x, out.first(m_));
  } else if (block_) {
    block_(order, x, out);
  } else {
    fd_block(order, x, out);
  }
}

namespace {

// Nested central differences: sum over k <= beta of prod_a C(beta_a, k_a)
// (-1)^(beta_a - k_a) f(x + (2k - beta) h) / (2h)^|beta|.
void central_stencil(const SampledFunction::ValueFn& f, std::size_t m, const MultiIndex& beta,
                     std::span<const double> x, double h, std::span<double> out,
                     const std::function<void(std::span<const double>)>& check) {
  const std::size_t d = x.size();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<int> k(d, 0);
  std::vector<double> y(d), val(m);
  const double scale = std::pow(2.0 * h, -beta.order());
  while (true) {
    double w = scale;
    for (std::size_t a = 0; a < d; ++a) {
      w *= binomial(beta[a], k[a]) * (((beta[a] - k[a]) % 2) ? -1.0 : 1.0);
      y[a] = x[a] + (2 * k[a] - beta[a]) * h;
    }
    if (check) check(y);
    f(y, val);
    for (std::size_t c = 0; c < m; ++c) out[c] += w * val[c];
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++k[a] <= beta[a]) break;
      k[a] = 0;
    }
    if (a == d) break;
  }
}

}  // namespace

void SampledFunction::fd_block(int order, std::span<const double> x, std::span<double> out) const {
  const auto& set = MultiIndexSet::get(dim(), order);
  for (std::size_t b = 0; b < set.size(); ++b) {
    central_stencil(value_, m_, set[b], x, fd_h_, out.subspan(b * m_, m_), {});
  }
}

SampledFunction SampledFunction::with_support(std::optional<Region> support) const {
  return SampledFunction(domain_, order_, m_, value_, block_, std::move(support));
}

const std::vector<LeibnizTerm>& leibniz_table(std::size_t dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<std::vector<LeibnizTerm>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) {
    slot = std::make_unique<std::vector<LeibnizTerm>>();
    const auto& set = MultiIndexSet::get(dim, order);
    for (std::size_t b = 0; b < set.size(); ++b) {
      for (std::size_t g = 0; g < set.size(); ++g) {
        if (!set[g].le(set[b])) continue;
        slot->push_back({b, g, set.index_of(set[b] - set[g]), static_cast<double>(multiindex_binom(set[b], set[g]))});
      }
    }
  }
  return *slot;
}

std::vector<double> product_rule_apply(const SampledFunction& g, const SampledFunction& f, const MultiIndex& beta,
                                       std::span<const double> x) {
  if (g.value_dim() != 1) throw Error(ErrorKind::precondition, "product rule needs a scalar multiplier");
  if (beta.order() > std::min(g.order(), f.order())) throw Error(ErrorKind::order, "order exceeds factor orders");
  const std::size_t m = f.value_dim();
  std::vector<double> out(m, 0.0);
  const std::size_t d = beta.dim();
  std::vector<int> gam(d, 0);
  while (true) {
    const MultiIndex gamma(gam);
    const double c = static_cast<double>(multiindex_binom(beta, gamma));
    const auto dg = g.evaluate(beta - gamma, x);
    const auto df = f.evaluate(gamma, x);
    for (std::size_t i = 0; i < m; ++i) out[i] += c * dg[0] * df[i];
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++gam[a] <= beta[a]) break;
      gam[a] = 0;
    }
    if (a == d) break;
  }
  return out;
}

std::vector<double> fd_derivative_oracle(const SampledFunction& f, const MultiIndex& beta, std::span<const double> x,
                                         double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::precondition, "finite-difference step must be positive");
  std::vector<double> out(f.value_dim());
  auto check = [&f](std::span<const double> y) {
    if (!f.domain().contains(y)) throw Error(ErrorKind::domain, "finite-difference stencil leaves the domain");
  };
  central_stencil([&f](std::span<const double> y, std::span<double> o) { f.value_unchecked(y, o); }, f.value_dim(),
                  beta, x, h, out, check);
  return out;
}

Region support_estimate(const SampledFunction& f, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::precondition, "support threshold must be positive");
  const auto& grid = f.domain().grid();
  const std::size_t m = f.value_dim();
  std::vector<double> vals(grid.size() * m);
  double gmax = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    f.value_unchecked(grid[p], std::span<double>(vals).subspan(p * m, m));
    for (std::size_t c = 0; c < m; ++c) gmax = std::max(gmax, std::abs(vals[p * m + c]));
  }
  if (gmax == 0.0) return {};
  const double cut = threshold * gmax;
  const auto& dboxes = f.domain().boxes();
  const std::size_t d = f.dim();
  std::vector<Box> found(dboxes.size());
  std::vector<bool> hit(dboxes.size(), false);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    bool big = false;
    for (std::size_t c = 0; c < m && !big; ++c) big = std::abs(vals[p * m + c]) > cut;
    if (!big) continue;
    const auto x = grid[p];
    for (std::size_t b = 0; b < dboxes.size(); ++b) {
      std::vector<double> tol(d);
      for (std::size_t a = 0; a < d; ++a) tol[a] = 1e-9 * f.domain().step()[a];
      if (!dboxes[b].contains(x, tol)) continue;
      if (!hit[b]) {
        found[b] = Box{{x.begin(), x.end()}, {x.begin(), x.end()}};
        hit[b] = true;
      } else {
        for (std::size_t a = 0; a < d; ++a) {
          found[b].lo[a] = std::min(found[b].lo[a], x[a]);
          found[b].hi[a] = std::max(found[b].hi[a], x[a]);
        }
      }
      break;
    }
  }
  std::vector<Box> boxes;
  for (std::size_t b = 0; b < dboxes.size(); ++b) {
    if (hit[b]) boxes.push_back(found[b]);
  }
  const auto step = f.domain().step();
  const auto origin = f.domain().origin();
  return Region::on_lattice(std::move(boxes), {origin.begin(), origin.end()}, {step.begin(), step.end()});
}

SampledFunction from_expressions(Region domain, int order, std::vector<Expression> coords,
                                 std::optional<Region> support) {
  if (coords.empty()) throw Error(ErrorKind::precondition, "need at least one coordinate expression");
  const std::size_t d = domain.dim();
  for (const auto& e : coords) {
    if (e.dim() != d) throw Error(ErrorKind::precondition, "expression dimension mismatch");
  }
  const std::size_t m = coords.size();
  auto shared = std::make_shared<const std::vector<Expression>>(std::move(coords));
  auto value = [shared](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < shared->size(); ++c) out[c] = (*shared)[c].eval(x);
  };
  auto block = [shared, d, m](int k, std::span<const double> x, std::span<double> out) {
    const auto& layout = JetLayout::get(d, k);
    double tmp[JetLayout::kMaxCoeffs];
    for (std::size_t c = 0; c < m; ++c) {
      const Jet jt = (*shared)[c].eval(x, layout);
      jt.derivatives(std::span<double>(tmp, layout.size()));
      for (std::size_t b = 0; b < layout.size(); ++b) out[b * m + c] = tmp[b];
    }
  };
  return SampledFunction(std::move(domain), order, m, value, block, std::move(support));
}

SampledFunction from_expressions(Region domain, int order, const std::vector<std::string>& coords) {
  std::vector<Expression> e;
  for (const auto& s : coords) e.push_back(Expression::parse(s, domain.dim()));
  return from_expressions(std::move(domain), order, std::move(e));
}

SampledFunction constant_function(Region domain, int order, std::vector<double> c) {
  const std::size_t m = c.size();
  auto value = [c](std::span<const double>, std::span<double> out) { std::copy(c.begin(), c.end(), out.begin()); };
  const std::size_t d = domain.dim();
  auto block = [c, d, m](int k, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(MultiIndexSet::get(d, k).size() * m), 0.0);
    std::copy(c.begin(), c.end(), out.begin());
  };
  return SampledFunction(std::move(domain), order, m, value, block);
}

SampledFunction zero_function(Region domain, int order, std::size_t value_dim) {
  const std::size_t d = domain.dim();
  auto value = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  auto block = [d, value_dim](int k, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(MultiIndexSet::get(d, k).size() * value_dim),
              0.0);
  };
  return SampledFunction(std::move(domain), order, value_dim, value, block, Region{});
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SampledFunction plane_waves(Region domain, int order, const std::vector<double>& nodes) {
  std::vector<std::string> e;
  for (double s : nodes) e.push_back("exp(-|x|^2)*cos(" + num(s) + "*x1)");
  const SampledFunction jets = from_expressions(domain, order, e);
  // values sit in every convolution inner loop, so skip the expression tree there
  auto value = [nodes](std::span<const double> x, std::span<double> out) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double g = std::exp(-r2);
    for (std::size_t q = 0; q < nodes.size(); ++q) out[q] = g * std::cos(nodes[q] * x[0]);
  };
  auto block = [jets](int k, std::span<const double> x, std::span<double> out) { jets.block_unchecked(k, x, out); };
  return SampledFunction(std::move(domain), order, nodes.size(), value, block);
}

SampledFunction gaussian(Region domain, int order, std::vector<double> e) {
  std::vector<std::string> c;
  for (double v : e) c.push_back(num(v) + "*exp(-|x|^2)");
  return from_expressions(std::move(domain), order, c);
}

SampledFunction polynomial_gaussian(Region domain, int order, const std::vector<double>& coeffs,
                                    std::vector<double> e) {
  std::string p = "0";
  for (std::size_t i = 0; i < coeffs.size(); ++i) p += "+" + num(coeffs[i]) + "*x1^" + std::to_string(i);
  std::vector<std::string> c;
  for (double v : e) c.push_back(num(v) + "*(" + p + ")*exp(-|x|^2)");
  return from_expressions(std::move(domain), order, c);
}

SampledFunction multiply(const SampledFunction& g, const SampledFunction& f) {
  if (g.value_dim() != 1) throw Error(ErrorKind::precondition, "multiplier must be scalar");
  if (g.dim() != f.dim()) throw Error(ErrorKind::precondition, "dimension mismatch");
  const int order = std::min(g.order(), f.order());
  const std::size_t m = f.value_dim();
  const std::size_t d = f.dim();
  auto value = [g, f, m](std::span<const double> x, std::span<double> out) {
    double gv;
    g.value_unchecked(x, std::span<double>(&gv, 1));
    if (gv == 0.0) {
      std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
      return;
    }
    f.value_unchecked(x, out);
    for (std::size_t c = 0; c < m; ++c) out[c] *= gv;
  };
  auto block = [g, f, m, d](int k, std::span<const double> x, std::span<double> out) {
    const auto& set = MultiIndexSet::get(d, k);
    std::vector<double> gb(set.size()), fb(set.size() * m);
    g.block_unchecked(k, x, gb);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(set.size() * m), 0.0);
    bool zero = true;
    for (double v : gb) zero = zero && v == 0.0;
    if (zero) return;
    f.block_unchecked(k, x, fb);
    for (const auto& t : leibniz_table(d, k)) {
      const double w = t.binom * gb[t.rest];
      for (std::size_t c = 0; c < m; ++c) out[t.beta * m + c] += w * fb[t.gamma * m + c];
    }
  };
  std::optional<Region> support;
  if (g.declared_support()) {
    const auto step = f.domain().step();
    const auto origin = f.domain().origin();
    support = g.declared_support()->empty()
                  ? Region{}
                  : Region::on_lattice(g.declared_support()->boxes(), {origin.begin(), origin.end()},
                                       {step.begin(), step.end()});
  } else if (f.declared_support()) {
    support = f.declared_support();
  }
  return SampledFunction(f.domain(), order, m, value, block, std::move(support));
}

SampledFunction linear_combination(double a, const SampledFunction& f, double b, const SampledFunction& g) {
  if (f.dim() != g.dim() || f.value_dim() != g.value_dim()) throw Error(ErrorKind::precondition, "shape mismatch");
  const int order = std::min(f.order(), g.order());
  const std::size_t m = f.value_dim();
  auto value = [a, b, f, g, m](std::span<const double> x, std::span<double> out) {
    std::vector<double> tmp(m);
    f.value_unchecked(x, out);
    g.value_unchecked(x, tmp);
    for (std::size_t c = 0; c < m; ++c) out[c] = a * out[c] + b * tmp[c];
  };
  auto block = [a, b, f, g](int k, std::span<const double> x, std::span<double> out) {
    const std::size_t n = f.block_size(k);
    std::vector<double> tmp(n);
    f.block_unchecked(k, x, out);
    g.block_unchecked(k, x, tmp);
    for (std::size_t i = 0; i < n; ++i) out[i] = a * out[i] + b * tmp[i];
  };
  std::optional<Region> support;
  if (f.declared_support() && g.declared_support()) {
    std::vector<Box> boxes = f.declared_support()->boxes();
    const auto& gb = g.declared_support()->boxes();
    boxes.insert(boxes.end(), gb.begin(), gb.end());
    const auto step = f.domain().step();
    const auto origin = f.domain().origin();
    support = boxes.empty() ? Region{}
                            : Region::on_lattice(std::move(boxes), {origin.begin(), origin.end()},
                                                 {step.begin(), step.end()});
  }
  return SampledFunction(f.domain(), order, m, value, block, std::move(support));
}

}  // namespace cvapprox
