#include "cvapprox/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "cvapprox/error.hpp"

namespace cvapprox {

void QuadratureSpec::validate() const {
  if (points_per_axis < 8) throw Error(ErrorKind::precondition, "quadrature needs at least 8 points per axis");
  if (!(tol > 0.0)) throw Error(ErrorKind::precondition, "quadrature tolerance must be positive");
  if (refinement_levels < 0) throw Error(ErrorKind::precondition, "refinement levels must be non-negative");
}

QuadratureSpec QuadratureSpec::alternate() const {
  QuadratureSpec q = *this;
  q.rule = rule == Rule::midpoint ? Rule::gauss : Rule::midpoint;
  return q;
}

const char* to_string(QuadratureSpec::Rule rule) noexcept {
  return rule == QuadratureSpec::Rule::midpoint ? "midpoint" : "gauss";
}

Rule1D gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  Rule1D r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  std::lock_guard lock(mu);
  cache.emplace(n, r);
  return r;
}

Rule1D rule_1d(QuadratureSpec::Rule rule, int n, double a, double b) {
  Rule1D r;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  if (rule == QuadratureSpec::Rule::midpoint) {
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(a + (i + 0.5) * h);
      r.weights.push_back(h);
    }
    return r;
  }
  const Rule1D g = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(mid + half * g.nodes[static_cast<std::size_t>(i)]);
    r.weights.push_back(half * g.weights[static_cast<std::size_t>(i)]);
  }
  return r;
}

TensorRule tensor_rule(QuadratureSpec::Rule rule, int n, const Box& box) {
  const std::size_t d = box.dim();
  std::vector<Rule1D> axes;
  for (std::size_t a = 0; a < d; ++a) axes.push_back(rule_1d(rule, n, box.lo[a], box.hi[a]));
  TensorRule t{PointSet(d), {}};
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  t.nodes.reserve(total);
  t.weights.reserve(total);
  std::vector<std::size_t> k(d, 0);
  std::vector<double> x(d);
  for (std::size_t c = 0; c < total; ++c) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      x[a] = axes[a].nodes[k[a]];
      w *= axes[a].weights[k[a]];
    }
    t.nodes.push_back(x);
    t.weights.push_back(w);
    for (std::size_t a = d; a-- > 0;) {
      if (++k[a] < static_cast<std::size_t>(n)) break;
      k[a] = 0;
    }
  }
  return t;
}

}  // namespace cvapprox
