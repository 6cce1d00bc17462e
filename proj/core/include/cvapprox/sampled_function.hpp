#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cvapprox/expression.hpp"
#include "cvapprox/multiindex.hpp"
#include "cvapprox/region.hpp"

namespace cvapprox {

/// Vector-valued C^k function on a gridded domain.
///
/// Derivative blocks hold every beta with |beta| <= order in
/// MultiIndexSet order, value_dim entries per beta: out[b * m + c].
class SampledFunction {
 public:
  using ValueFn = std::function<void(std::span<const double> x, std::span<double> out)>;
  using BlockFn = std::function<void(int order, std::span<const double> x, std::span<double> out)>;
  enum class Provider { analytic, finite_difference };

  SampledFunction() = default;
  /// Without `block`, derivatives come from nested central differences with
  /// step half the smallest grid step.
  SampledFunction(Region domain, int order, std::size_t value_dim, ValueFn value, BlockFn block = {},
                  std::optional<Region> support = std::nullopt);

  const Region& domain() const noexcept { return domain_; }
  std::size_t dim() const noexcept { return domain_.dim(); }
  int order() const noexcept { return order_; }
  std::size_t value_dim() const noexcept { return m_; }
  Provider provider() const noexcept { return provider_; }
  /// Empty region means identically zero.
  const std::optional<Region>& declared_support() const noexcept { return support_; }
  double fd_step() const noexcept { return fd_h_; }
  bool valid() const noexcept { return static_cast<bool>(value_); }

  std::vector<double> value(std::span<const double> x) const;
  std::vector<double> evaluate(const MultiIndex& beta, std::span<const double> x) const;
  void block(int order, std::span<const double> x, std::span<double> out) const;

  /// No domain or order checks; `out` sized value_dim / block size.
  void value_unchecked(std::span<const double> x, std::span<double> out) const { value_(x, out); }
  void block_unchecked(int order, std::span<const double> x, std::span<double> out) const;
  /// True when x is outside the declared support (so every derivative is 0).
  bool outside_support(std::span<const double> x) const;

  std::size_t block_size(int order) const;
  SampledFunction with_support(std::optional<Region> support) const;

 private:
  void fd_block(int order, std::span<const double> x, std::span<double> out) const;
  void check_point(std::span<const double> x) const;

  Region domain_;
  int order_ = 0;
  std::size_t m_ = 0;
  ValueFn value_;
  BlockFn block_;
  Provider provider_ = Provider::analytic;
  std::optional<Region> support_;
  std::vector<Box> support_boxes_;  // declared support, inflated by a hair
  double fd_h_ = 0.0;
};

/// Entries of the Leibniz sum: for each beta in the set, the pairs (gamma, beta - gamma).
struct LeibnizTerm {
  std::size_t beta, gamma, rest;
  double binom;
};
const std::vector<LeibnizTerm>& leibniz_table(std::size_t dim, int order);

/// d^beta (g f)(x) as the binomial sum over gamma <= beta.
std::vector<double> product_rule_apply(const SampledFunction& g, const SampledFunction& f, const MultiIndex& beta,
                                       std::span<const double> x);

/// Nested second-order central differences of the evaluator. Test oracle.
std::vector<double> fd_derivative_oracle(const SampledFunction& f, const MultiIndex& beta, std::span<const double> x,
                                         double h);

/// Grid-aligned box union (one box per domain box) holding every grid point
/// where some coordinate exceeds threshold * global max. Empty when none.
Region support_estimate(const SampledFunction& f, double threshold = 1e-12);

// Builders.
SampledFunction from_expressions(Region domain, int order, std::vector<Expression> coords,
                                 std::optional<Region> support = std::nullopt);
SampledFunction from_expressions(Region domain, int order, const std::vector<std::string>& coords);
SampledFunction constant_function(Region domain, int order, std::vector<double> c);
SampledFunction zero_function(Region domain, int order, std::size_t value_dim);
/// f(x, s_q) = exp(-|x|^2) cos(s_q x1), one coordinate per node.
SampledFunction plane_waves(Region domain, int order, const std::vector<double>& nodes);
/// exp(-|x|^2) * e.
SampledFunction gaussian(Region domain, int order, std::vector<double> e);
/// p(x1) exp(-|x|^2) * e with p given by ascending coefficients.
SampledFunction polynomial_gaussian(Region domain, int order, const std::vector<double>& coeffs, std::vector<double> e);

/// g * f with derivatives from the Leibniz sum; order is the smaller one.
SampledFunction multiply(const SampledFunction& g, const SampledFunction& f);
/// a f + b g on f's domain.
SampledFunction linear_combination(double a, const SampledFunction& f, double b, const SampledFunction& g);

}  // namespace cvapprox
