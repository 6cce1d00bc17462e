#pragma once

#include <span>
#include <vector>

#include "cvapprox/multiindex.hpp"
#include "cvapprox/quadrature.hpp"
#include "cvapprox/sampled_function.hpp"

namespace cvapprox {

/// h(s) = exp(-1/(1-s)) and its derivatives; exactly 0 for s >= 1 - 1e-8.
double bump_profile(int k, double s);

/// d^beta of z -> h(|z|^2), unnormalized.
double bump_derivative(const MultiIndex& beta, std::span<const double> z);
/// All d^beta with |beta| <= order, in MultiIndexSet order.
void bump_block(std::size_t dim, int order, std::span<const double> z, std::span<double> out);

struct MassCheck {
  double base = 0.0;     // quadrature of rho_n at the base point count
  double refined = 0.0;  // after the refinement levels
  int levels = 0;
};

/// rho_n(x) = n^d rho(n x), rho = C exp(-1/(1-|x|^2)) on the unit ball.
class Mollifier {
 public:
  static constexpr int kMaxDeriv = 6;

  Mollifier(std::size_t dim, int n, int max_deriv, double normC, MassCheck mass);

  std::size_t dim() const noexcept { return d_; }
  int scale() const noexcept { return n_; }
  int max_deriv() const noexcept { return max_deriv_; }
  double normC() const noexcept { return C_; }
  double radius() const noexcept { return 1.0 / n_; }
  const MassCheck& mass() const noexcept { return mass_; }

  /// Unscaled rho.
  double unit_value(std::span<const double> z) const;
  double value(std::span<const double> x) const;
  double derivative(const MultiIndex& beta, std::span<const double> x) const;
  void block(int order, std::span<const double> x, std::span<double> out) const;

  /// rho_n as a sampled function on the given domain, support the closed ball's box.
  SampledFunction as_function(const Region& domain) const;

 private:
  std::size_t d_;
  int n_;
  int max_deriv_;
  double C_;
  double scale_d_;
  MassCheck mass_;
};

/// Normalization 1 / int exp(-1/(1-|x|^2)) over the unit ball, refined until
/// successive levels differ by less than quad.tol. Cached per (d, quad).
double mollifier_normalization(std::size_t dim, const QuadratureSpec& quad);

Mollifier build_mollifier(std::size_t dim, int n, const QuadratureSpec& quad, int max_deriv);

/// Quadrature nodes over the support ball with weights times d^beta rho_n.
struct KernelTable {
  std::size_t dim = 0;
  int order = 0;
  std::size_t width = 0;  // MultiIndexSet(dim, order).size()
  PointSet nodes;
  std::vector<double> weights;  // plain quadrature weights
  std::vector<double> w;        // weights[q] * d^beta rho_n(node q), row q
  std::vector<double> abs_sum;  // per beta: sum_q |w|
};

KernelTable kernel_table(const Mollifier& moll, const QuadratureSpec& quad, int order);
KernelTable kernel_table(const Mollifier& moll, QuadratureSpec::Rule rule, int points, int order);

}  // namespace cvapprox
