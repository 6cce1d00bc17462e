#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cvapprox {

/// A seminorm on sample vectors: plain sup, sup over a coordinate subset,
/// or sup with positive coordinate weights.
class SeminormIndex {
 public:
  enum class Kind { sup, subset, weighted };

  static SeminormIndex sup();
  static SeminormIndex subset(std::vector<std::size_t> coords);
  static SeminormIndex weighted(std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  SeminormIndex& named(std::string n) {
    name_ = std::move(n);
    return *this;
  }
  const std::vector<std::size_t>& coords() const noexcept { return coords_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double operator()(std::span<const double> v) const;
  /// p(a - b) without materializing the difference.
  double distance(std::span<const double> a, std::span<const double> b) const;
  /// Throws if the index refers to coordinates outside [0, m).
  void check_dim(std::size_t m) const;

 private:
  Kind kind_ = Kind::sup;
  std::string name_ = "sup";
  std::vector<std::size_t> coords_;
  std::vector<double> weights_;
};

}  // namespace cvapprox
