#include "cvapprox/finite_rank.hpp"

#include <algorithm>

#include "cvapprox/error.hpp"

namespace cvapprox {

FiniteRankFunction::FiniteRankFunction(Region domain, std::size_t value_dim, int order,
                                       std::vector<SampledFunction> factors, std::vector<std::vector<double>> vectors,
                                       std::shared_ptr<const FactorBank> bank)
    : domain_(std::move(domain)),
      m_(value_dim),
      order_(order),
      factors_(std::move(factors)),
      vectors_(std::move(vectors)),
      bank_(std::move(bank)) {
  if (factors_.size() != vectors_.size()) throw Error(ErrorKind::precondition, "factor/vector count mismatch");
  if (bank_ && bank_->size() != vectors_.size()) throw Error(ErrorKind::precondition, "bank size mismatch");
  for (const auto& v : vectors_) {
    if (v.size() != m_) throw Error(ErrorKind::precondition, "value vector length mismatch");
  }
  for (const auto& f : factors_) {
    if (f.value_dim() != 1) throw Error(ErrorKind::precondition, "factors must be scalar");
  }
}

std::vector<double> FiniteRankFunction::value(std::span<const double> x) const {
  std::vector<double> out(m_);
  block(0, x, out);
  return out;
}

void FiniteRankFunction::block(int order, std::span<const double> x, std::span<double> out) const {
  if (order > order_) throw Error(ErrorKind::order, "derivative order exceeds finite-rank order");
  const std::size_t nb = MultiIndexSet::get(domain_.dim(), order).size();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nb * m_), 0.0);
  if (bank_) {
    thread_local SparseBlock sb;
    bank_->nonzero(order, x, sb);
    for (std::size_t t = 0; t < sb.size(); ++t) {
      const auto& e = vectors_[sb.index[t]];
      for (std::size_t b = 0; b < nb; ++b) {
        const double w = sb.values[t * nb + b];
        if (w == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) out[b * m_ + c] += w * e[c];
      }
    }
    return;
  }
  std::vector<double> fb(nb);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    factors_[i].block_unchecked(order, x, fb);
    for (std::size_t b = 0; b < nb; ++b) {
      if (fb[b] == 0.0) continue;
      for (std::size_t c = 0; c < m_; ++c) out[b * m_ + c] += fb[b] * vectors_[i][c];
    }
  }
}

FiniteRankFunction FiniteRankFunction::scaled(double lambda) const {
  auto v = vectors_;
  for (auto& e : v) {
    for (double& c : e) c *= lambda;
  }
  return FiniteRankFunction(domain_, m_, order_, factors_, std::move(v), bank_);
}

SampledFunction FiniteRankFunction::as_function(std::optional<Region> support) const {
  auto self = std::make_shared<const FiniteRankFunction>(*this);
  auto value = [self](std::span<const double> x, std::span<double> out) { self->block(0, x, out); };
  auto block = [self](int k, std::span<const double> x, std::span<double> out) { self->block(k, x, out); };
  if (terms() == 0 && !support) support = Region{};
  return SampledFunction(domain_, order_, m_, value, block, std::move(support));
}

}  // namespace cvapprox
