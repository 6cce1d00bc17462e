#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cvapprox {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : c_(dim, 0) {}
  MultiIndex(std::initializer_list<int> c);
  explicit MultiIndex(std::vector<int> c);

  static MultiIndex unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const noexcept { return c_.size(); }
  int order() const noexcept;
  int operator[](std::size_t i) const { return c_[i]; }
  int& operator[](std::size_t i) { return c_[i]; }
  std::span<const int> components() const noexcept { return c_; }

  /// Componentwise comparison.
  bool le(const MultiIndex& other) const;
  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  /// beta! = prod beta_n!
  double factorial() const;

  std::string str() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> c_;
};

/// prod_n C(beta_n, gamma_n); throws precondition when gamma is not <= beta.
std::uint64_t multiindex_binom(const MultiIndex& beta, const MultiIndex& gamma);

double binomial(int n, int k);

/// All multi-indices of dimension d with order <= max_order, graded then
/// lexicographically descending in the first component (so (1,0) before (0,1)).
class MultiIndexSet {
 public:
  MultiIndexSet(std::size_t dim, int max_order);

  std::size_t dim() const noexcept { return dim_; }
  int max_order() const noexcept { return max_order_; }
  std::size_t size() const noexcept { return list_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<MultiIndex>& list() const noexcept { return list_; }
  /// Number of entries with order <= k (prefix length, since the list is graded).
  std::size_t count_up_to(int k) const { return prefix_[static_cast<std::size_t>(k)]; }
  /// Position of beta, or npos when |beta| exceeds max_order.
  std::size_t index_of(const MultiIndex& beta) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Shared instance, built once per (dim, order).
  static const MultiIndexSet& get(std::size_t dim, int max_order);

 private:
  std::size_t dim_;
  int max_order_;
  std::vector<MultiIndex> list_;
  std::vector<std::size_t> prefix_;
  std::vector<std::size_t> lookup_;  // dense table over (max_order+1)^dim
};

}  // namespace cvapprox
