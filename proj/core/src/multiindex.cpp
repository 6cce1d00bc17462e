#include "cvapprox/multiindex.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "cvapprox/error.hpp"

namespace cvapprox {

MultiIndex::MultiIndex(std::initializer_list<int> c) : c_(c) {
  for (int v : c_) {
    if (v < 0) throw Error(ErrorKind::precondition, "negative multi-index component");
  }
}

MultiIndex::MultiIndex(std::vector<int> c) : c_(std::move(c)) {
  for (int v : c_) {
    if (v < 0) throw Error(ErrorKind::precondition, "negative multi-index component");
  }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  MultiIndex m(dim);
  m.c_.at(axis) = 1;
  return m;
}

int MultiIndex::order() const noexcept { return std::accumulate(c_.begin(), c_.end(), 0); }

bool MultiIndex::le(const MultiIndex& other) const {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] > other.c_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_.at(i);
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  if (!o.le(*this)) throw Error(ErrorKind::precondition, "multi-index difference would be negative");
  MultiIndex r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : c_) {
    for (int k = 2; k <= v; ++k) f *= k;
  }
  return f;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
  os << ')';
  return os.str();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t multiindex_binom(const MultiIndex& beta, const MultiIndex& gamma) {
  if (!gamma.le(beta)) {
    throw Error(ErrorKind::precondition, "binomial needs gamma <= beta, got " + gamma.str() +
                                             " vs " + beta.str());
  }
  std::uint64_t r = 1;
  for (std::size_t n = 0; n < beta.dim(); ++n) {
    std::uint64_t c = 1;
    const int b = beta[n];
    const int g = gamma[n];
    for (int i = 1; i <= g; ++i) c = c * static_cast<std::uint64_t>(b - g + i) / static_cast<std::uint64_t>(i);
    r *= c;
  }
  return r;
}

namespace {

void append_order(std::size_t dim, int remaining, std::size_t axis, std::vector<int>& cur,
                  std::vector<MultiIndex>& out) {
  if (axis + 1 == dim) {
    cur[axis] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[axis] = v;
    append_order(dim, remaining - v, axis + 1, cur, out);
  }
}

}  // namespace

MultiIndexSet::MultiIndexSet(std::size_t dim, int max_order) : dim_(dim), max_order_(max_order) {
  if (dim == 0 || max_order < 0) throw Error(ErrorKind::precondition, "bad multi-index set shape");
  std::vector<int> cur(dim, 0);
  for (int k = 0; k <= max_order; ++k) {
    append_order(dim, k, 0, cur, list_);
    prefix_.push_back(list_.size());
  }
  std::size_t table = 1;
  for (std::size_t i = 0; i < dim; ++i) table *= static_cast<std::size_t>(max_order + 1);
  lookup_.assign(table, npos);
  for (std::size_t p = 0; p < list_.size(); ++p) {
    std::size_t key = 0;
    for (std::size_t i = 0; i < dim; ++i) key = key * static_cast<std::size_t>(max_order + 1) + static_cast<std::size_t>(list_[p][i]);
    lookup_[key] = p;
  }
}

std::size_t MultiIndexSet::index_of(const MultiIndex& beta) const {
  if (beta.dim() != dim_ || beta.order() > max_order_) return npos;
  std::size_t key = 0;
  for (std::size_t i = 0; i < dim_; ++i) key = key * static_cast<std::size_t>(max_order_ + 1) + static_cast<std::size_t>(beta[i]);
  return lookup_[key];
}

const MultiIndexSet& MultiIndexSet::get(std::size_t dim, int max_order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<MultiIndexSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, max_order}];
  if (!slot) slot = std::make_unique<MultiIndexSet>(dim, max_order);
  return *slot;
}

}  // namespace cvapprox
