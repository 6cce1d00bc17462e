#include "cvapprox/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cvapprox/error.hpp"

namespace cvapprox {

JetLayout::JetLayout(std::size_t dim, int order) : set_(dim, order) {
  if (set_.size() > kMaxCoeffs) throw Error(ErrorKind::order, "jet layout too large");
  const auto& list = set_.list();
  for (std::size_t p = 0; p < list.size(); ++p) {
    for (std::size_t q = 0; q < list.size(); ++q) {
      if (list[p].order() + list[q].order() > order) continue;
      const std::size_t r = set_.index_of(list[p] + list[q]);
      products_.push_back({static_cast<std::uint16_t>(p), static_cast<std::uint16_t>(q), static_cast<std::uint16_t>(r)});
    }
    factorials_.push_back(list[p].factorial());
  }
  for (std::size_t a = 0; a < dim; ++a) {
    units_.push_back(order >= 1 ? set_.index_of(MultiIndex::unit(dim, a)) : MultiIndexSet::npos);
  }
}

const JetLayout& JetLayout::get(std::size_t dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_unique<JetLayout>(dim, order);
  return *slot;
}

Jet Jet::variable(const JetLayout& layout, double value, std::size_t axis) {
  Jet j(layout, value);
  if (layout.order() >= 1) j.c_[layout.unit(axis)] = 1.0;
  return j;
}

void Jet::derivatives(std::span<double> out) const {
  for (std::size_t i = 0; i < size(); ++i) out[i] = c_[i] * layout_->factorial(i);
}

bool Jet::is_constant() const {
  for (std::size_t i = 1; i < size(); ++i) {
    if (c_[i] != 0.0) return false;
  }
  return true;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (std::size_t i = 0; i < size(); ++i) c_[i] *= s;
  return *this;
}

Jet operator-(Jet a) {
  for (std::size_t i = 0; i < a.size(); ++i) a.c_[i] = -a.c_[i];
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(*a.layout_);
  for (const auto& t : a.layout_->products()) r.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
  return r;
}

Jet Jet::compose(std::span<const double> derivs) const {
  const int order = layout_->order();
  Jet delta = *this;
  delta.c_[0] = 0.0;
  double fact = 1.0;
  for (int k = 2; k <= order; ++k) fact *= k;
  Jet r(*layout_, derivs[static_cast<std::size_t>(order)] / fact);
  for (int k = order - 1; k >= 0; --k) {
    fact /= (k + 1);
    r = r * delta;
    r.c_[0] += derivs[static_cast<std::size_t>(k)] / fact;
  }
  return r;
}

namespace {

using Derivs = std::array<double, 16>;

int jet_order(const Jet& a) {
  const int order = a.layout().order();
  if (order > 15) throw Error(ErrorKind::order, "jet order too large");
  return order;
}

Derivs pow_derivs(double v, double p, int order) {
  Derivs d{};
  const bool nonneg_int = p >= 0.0 && std::floor(p) == p;
  double coef = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (nonneg_int && k > p) {
      d[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    d[static_cast<std::size_t>(k)] = coef * std::pow(v, p - k);
    coef *= (p - k);
  }
  return d;
}

}  // namespace

Jet operator/(const Jet& a, const Jet& b) {
  if (b.is_constant()) {
    Jet r = a;
    return r *= 1.0 / b.value();
  }
  return a * pow(b, -1.0);
}

Jet exp(const Jet& a) {
  Derivs d;
  d.fill(std::exp(a.value()));
  return a.compose(d);
}

Jet log(const Jet& a) {
  const int order = jet_order(a);
  Derivs d{};
  const double v = a.value();
  d[0] = std::log(v);
  double f = 1.0;
  for (int k = 1; k <= order; ++k) {
    d[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * f / std::pow(v, k);
    f *= k;
  }
  return a.compose(d);
}

Jet pow(const Jet& a, double p) { return a.compose(pow_derivs(a.value(), p, jet_order(a))); }

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) return pow(a, b.value());
  return exp(b * log(a));
}

Jet sin(const Jet& a) {
  const int order = jet_order(a);
  Derivs d{};
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = cyc[k % 4];
  return a.compose(d);
}

Jet cos(const Jet& a) {
  const int order = jet_order(a);
  Derivs d{};
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = cyc[k % 4];
  return a.compose(d);
}

Jet abs(const Jet& a) { return a.value() < 0.0 ? -a : a; }

}  // namespace cvapprox
