#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cvapprox/sampled_function.hpp"

namespace cvapprox {

/// Nonzero factor derivatives at one point: index[i] with
/// values[i * width .. (i + 1) * width) in MultiIndexSet order.
struct SparseBlock {
  std::size_t width = 0;
  std::vector<std::size_t> index;
  std::vector<double> values;

  void reset(std::size_t w) {
    width = w;
    index.clear();
    values.clear();
  }
  std::size_t size() const noexcept { return index.size(); }
};

/// Batch evaluator for many scalar factors that are mostly zero at any point.
class FactorBank {
 public:
  virtual ~FactorBank() = default;
  virtual std::size_t size() const = 0;
  virtual int order() const = 0;
  virtual void nonzero(int order, std::span<const double> x, SparseBlock& out) const = 0;
};

/// Sum of phi_i(x) e_i.
class FiniteRankFunction {
 public:
  FiniteRankFunction(Region domain, std::size_t value_dim, int order, std::vector<SampledFunction> factors,
                     std::vector<std::vector<double>> vectors, std::shared_ptr<const FactorBank> bank = nullptr);

  const Region& domain() const noexcept { return domain_; }
  std::size_t value_dim() const noexcept { return m_; }
  int order() const noexcept { return order_; }
  std::size_t terms() const noexcept { return vectors_.size(); }
  std::size_t rank() const noexcept { return terms(); }
  const SampledFunction& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<double>& vector(std::size_t i) const { return vectors_.at(i); }
  const std::shared_ptr<const FactorBank>& bank() const noexcept { return bank_; }

  std::vector<double> value(std::span<const double> x) const;
  void block(int order, std::span<const double> x, std::span<double> out) const;

  FiniteRankFunction scaled(double lambda) const;
  /// View as an ordinary sampled function on the same domain.
  SampledFunction as_function(std::optional<Region> support = std::nullopt) const;

 private:
  Region domain_;
  std::size_t m_;
  int order_;
  std::vector<SampledFunction> factors_;
  std::vector<std::vector<double>> vectors_;
  std::shared_ptr<const FactorBank> bank_;
};

}  // namespace cvapprox
