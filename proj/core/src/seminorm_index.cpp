#include "cvapprox/seminorm_index.hpp"

#include <algorithm>
#include <cmath>

#include "cvapprox/error.hpp"

namespace cvapprox {

SeminormIndex SeminormIndex::sup() { return {}; }

SeminormIndex SeminormIndex::subset(std::vector<std::size_t> coords) {
  if (coords.empty()) throw Error(ErrorKind::precondition, "coordinate subset must be non-empty");
  SeminormIndex s;
  s.kind_ = Kind::subset;
  s.name_ = "subset";
  s.coords_ = std::move(coords);
  return s;
}

SeminormIndex SeminormIndex::weighted(std::vector<double> weights) {
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::precondition, "seminorm weights must be positive");
  }
  SeminormIndex s;
  s.kind_ = Kind::weighted;
  s.name_ = "weighted";
  s.weights_ = std::move(weights);
  return s;
}

void SeminormIndex::check_dim(std::size_t m) const {
  if (kind_ == Kind::subset) {
    for (std::size_t c : coords_) {
      if (c >= m) throw Error(ErrorKind::index, "seminorm coordinate " + std::to_string(c) + " out of range");
    }
  } else if (kind_ == Kind::weighted && weights_.size() != m) {
    throw Error(ErrorKind::index, "seminorm weight count does not match value dimension");
  }
}

double SeminormIndex::operator()(std::span<const double> v) const {
  double r = 0.0;
  switch (kind_) {
    case Kind::sup:
      for (double x : v) r = std::max(r, std::abs(x));
      break;
    case Kind::subset:
      for (std::size_t c : coords_) r = std::max(r, std::abs(v[c]));
      break;
    case Kind::weighted:
      for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, weights_[i] * std::abs(v[i]));
      break;
  }
  return r;
}

double SeminormIndex::distance(std::span<const double> a, std::span<const double> b) const {
  double r = 0.0;
  switch (kind_) {
    case Kind::sup:
      for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
      break;
    case Kind::subset:
      for (std::size_t c : coords_) r = std::max(r, std::abs(a[c] - b[c]));
      break;
    case Kind::weighted:
      for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, weights_[i] * std::abs(a[i] - b[i]));
      break;
  }
  return r;
}

}  // namespace cvapprox
