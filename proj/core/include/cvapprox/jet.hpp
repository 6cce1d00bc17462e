#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cvapprox/multiindex.hpp"

namespace cvapprox {

/// Truncated multivariate Taylor expansion: coefficient of (x - x0)^beta / 1
/// for every |beta| <= order. The derivative is beta! times the coefficient.
class JetLayout {
 public:
  static constexpr std::size_t kMaxCoeffs = 84;

  JetLayout(std::size_t dim, int order);
  static const JetLayout& get(std::size_t dim, int order);

  std::size_t dim() const noexcept { return set_.dim(); }
  int order() const noexcept { return set_.max_order(); }
  std::size_t size() const noexcept { return set_.size(); }
  const MultiIndexSet& indices() const noexcept { return set_; }

  struct Term {
    std::uint16_t lhs, rhs, out;
  };
  const std::vector<Term>& products() const noexcept { return products_; }
  std::size_t unit(std::size_t axis) const { return units_[axis]; }
  double factorial(std::size_t i) const { return factorials_[i]; }

 private:
  MultiIndexSet set_;
  std::vector<Term> products_;
  std::vector<std::size_t> units_;
  std::vector<double> factorials_;
};

class Jet {
 public:
  Jet() = default;
  explicit Jet(const JetLayout& layout, double value = 0.0) : layout_(&layout) {
    c_.fill(0.0);
    c_[0] = value;
  }
  static Jet variable(const JetLayout& layout, double value, std::size_t axis);

  const JetLayout& layout() const { return *layout_; }
  double value() const noexcept { return c_[0]; }
  double coeff(std::size_t i) const { return c_[i]; }
  double& coeff(std::size_t i) { return c_[i]; }
  std::size_t size() const { return layout_->size(); }
  /// All derivatives in layout order.
  void derivatives(std::span<double> out) const;
  bool is_constant() const;

  /// f(this) given f^{(k)}(value()) for k = 0..order.
  Jet compose(std::span<const double> derivs) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(Jet a);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }

 private:
  const JetLayout* layout_ = nullptr;
  std::array<double, JetLayout::kMaxCoeffs> c_{};
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet pow(const Jet& a, const Jet& b);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet abs(const Jet& a);

}  // namespace cvapprox
