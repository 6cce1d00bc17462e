#pragma once

// Independent reference computations. Nothing here calls into the library's
// numerics, so agreement with it is evidence rather than a tautology.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using Fn1 = std::function<double(double)>;

namespace detail {

inline double simpson_step(const Fn1& f, double a, double b, double fa, double fm, double fb, double whole,
                           double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction.
inline double adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth = 50) {
  // split once so a symmetric integrand cannot fool the first error estimate
  double sum = 0.0;
  constexpr int pieces = 8;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    sum += detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol / pieces, max_depth);
  }
  return sum;
}

/// exp(-1 / (1 - s)) for s < 1, else 0.
inline double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

/// Integral of the unnormalized unit bump exp(-1/(1-|x|^2)) over the unit ball,
/// reduced to one radial integral (d = 1 or 2).
inline double unit_bump_mass(int d, double tol) {
  if (d == 1) return 2.0 * adaptive_simpson([](double r) { return bump(r * r); }, 0.0, 1.0, tol);
  return 2.0 * std::numbers::pi * adaptive_simpson([](double r) { return r * bump(r * r); }, 0.0, 1.0, tol);
}

/// Integral of a radial function g(|x|) over the ball of radius R in d = 1, 2.
inline double radial_mass(int d, const Fn1& g, double R, double tol) {
  if (d == 1) return 2.0 * adaptive_simpson(g, 0.0, R, tol);
  return 2.0 * std::numbers::pi * adaptive_simpson([&](double r) { return r * g(r); }, 0.0, R, tol);
}

/// Max of f over n + 1 equispaced points of [a, b], with the arg max.
struct ScanMax {
  double value = -std::numeric_limits<double>::infinity();
  double at = 0.0;
};
inline ScanMax scan_max(const Fn1& f, double a, double b, std::size_t n) {
  ScanMax s;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    const double v = f(x);
    if (v > s.value) {
      s.value = v;
      s.at = x;
    }
  }
  return s;
}

/// Central difference of order k (k = 1, 2) with step h.
inline double central(const Fn1& f, double x, int k, double h) {
  if (k == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Step sweep: estimates at h, h/2, h/4, the Richardson value, and the
/// observed convergence order log2(|e(h) - e(h/2)| / |e(h/2) - e(h/4)|).
struct Sweep {
  double h1 = 0.0, h2 = 0.0, h4 = 0.0;
  double richardson = 0.0;
  double observed_order = 0.0;
};
inline Sweep fd_sweep(const Fn1& f, double x, int k, double h) {
  Sweep s;
  s.h1 = central(f, x, k, h);
  s.h2 = central(f, x, k, h / 2);
  s.h4 = central(f, x, k, h / 4);
  s.richardson = (4.0 * s.h4 - s.h2) / 3.0;
  const double a = std::abs(s.h1 - s.h2), b = std::abs(s.h2 - s.h4);
  s.observed_order = (a > 0 && b > 0) ? std::log2(a / b) : std::numeric_limits<double>::infinity();
  return s;
}

/// Root of a monotone function on [a, b] by bisection.
inline double bisect(const Fn1& f, double a, double b, double tol = 1e-13) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Brute-force greedy cover on a one-dimensional lattice: first center the
/// first K node, then repeatedly the uncovered K node farthest from all
/// centers (lowest index on ties). Radius is the distance to the nearest W
/// node whose value differs by at least `target`, capped at the W diameter;
/// node p is covered by (c, R) when |p - c| + h < R.
struct GreedyResult {
  std::vector<double> centers;
  std::vector<double> radii;
};
inline GreedyResult greedy_cover_1d(const std::vector<double>& w_nodes, const std::vector<char>& in_k,
                                    const std::function<double(double, double)>& gap, double target, double h) {
  GreedyResult g;
  const std::size_t n = w_nodes.size();
  const double diam = w_nodes.back() - w_nodes.front();
  std::vector<char> covered(n, 0);
  auto add = [&](std::size_t c) {
    double R = diam;
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = std::abs(w_nodes[i] - w_nodes[c]);
      if (dist < R && gap(w_nodes[i], w_nodes[c]) >= target) R = dist;
    }
    g.centers.push_back(w_nodes[c]);
    g.radii.push_back(R);
    for (std::size_t i = 0; i < n; ++i) {
      if (in_k[i] && std::abs(w_nodes[i] - w_nodes[c]) + h < R) covered[i] = 1;
    }
  };
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_k[i]) {
      first = i;
      break;
    }
  }
  if (first == n) return g;
  add(first);
  while (true) {
    double best = -1.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_k[i] || covered[i]) continue;
      double dn = std::numeric_limits<double>::infinity();
      for (double c : g.centers) dn = std::min(dn, std::abs(w_nodes[i] - c));
      if (dn > best) {
        best = dn;
        pick = i;
      }
    }
    if (pick == n) break;
    add(pick);
  }
  return g;
}

/// The normalized one-dimensional unit bump rho and its running integral
/// S(t) = int_{-1}^t rho, tabulated with cubic Hermite interpolation (S' = rho
/// is exact at the knots).
class UnitStep {
 public:
  explicit UnitStep(std::size_t knots = 20000) : h_(2.0 / static_cast<double>(knots)), S_(knots + 1, 0.0) {
    I_ = unit_bump_mass(1, 1e-14);
    for (std::size_t k = 1; k <= knots; ++k) {
      const double a = -1.0 + h_ * static_cast<double>(k - 1);
      S_[k] = S_[k - 1] + adaptive_simpson([](double s) { return bump(s * s); }, a, a + h_, 1e-16) / I_;
    }
    const double top = S_.back();
    for (double& v : S_) v /= top;
  }
  double rho(double t) const { return bump(t * t) / I_; }
  double rho_prime(double t) const {
    if (std::abs(t) >= 1.0) return 0.0;
    const double u = 1.0 - t * t;
    return -2.0 * t / (u * u) * rho(t);
  }
  double S(double t) const {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double u = (t + 1.0) / h_;
    const std::size_t k = std::min(static_cast<std::size_t>(u), S_.size() - 2);
    const double s = u - static_cast<double>(k);
    const double t0 = -1.0 + h_ * static_cast<double>(k), t1 = t0 + h_;
    const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
    return h00 * S_[k] + h10 * h_ * rho(t0) + h01 * S_[k + 1] + h11 * h_ * rho(t1);
  }

 private:
  double h_;
  double I_ = 1.0;
  std::vector<double> S_;
};

/// exp(-x^2) times the mollified indicator of [-a, a] at scale n; value and
/// first derivative.
struct CutGaussian {
  const UnitStep& step;
  double a = 2.5;
  double n = 4.0;
  double value(double x) const { return (step.S(n * (x + a)) - step.S(n * (x - a))) * std::exp(-x * x); }
  double derivative(double x) const {
    const double psi = step.S(n * (x + a)) - step.S(n * (x - a));
    const double dpsi = n * (step.rho(n * (x + a)) - step.rho(n * (x - a)));
    return (dpsi - 2.0 * x * psi) * std::exp(-x * x);
  }
};

/// sup over a grid of step h on [-R, R] of max_{k <= l} |d^k (f - f * rho_n)| (1 + x^2)^(l/2),
/// the convolution by adaptive quadrature over the kernel's support.
inline double regularization_gap(const CutGaussian& f, int n, int l, double R, double h) {
  const UnitStep& st = f.step;
  const double r = 1.0 / n;
  double best = 0.0;
  const auto steps = static_cast<long long>(std::llround(2.0 * R / h));
  for (long long i = 0; i <= steps; ++i) {
    const double x = -R + h * static_cast<double>(i);
    const double w = std::pow(1.0 + x * x, 0.5 * l);
    const double conv = adaptive_simpson([&](double y) { return f.value(x - y) * n * st.rho(n * y); }, -r, r, 1e-13);
    double v = std::abs(f.value(x) - conv);
    if (l >= 1) {
      const double dconv =
          adaptive_simpson([&](double y) { return f.derivative(x - y) * n * st.rho(n * y); }, -r, r, 1e-13);
      v = std::max(v, std::abs(f.derivative(x) - dconv));
    }
    best = std::max(best, v * w);
  }
  return best;
}

}  // namespace oracle
