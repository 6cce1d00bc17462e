#pragma once

#include <vector>

#include "cvapprox/region.hpp"

namespace cvapprox {

struct QuadratureSpec {
  enum class Rule { midpoint, gauss };
  Rule rule = Rule::midpoint;
  int points_per_axis = 64;
  int refinement_levels = 2;
  double tol = 1e-9;

  void validate() const;
  /// The other rule with the same point count.
  QuadratureSpec alternate() const;
};

const char* to_string(QuadratureSpec::Rule rule) noexcept;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on the Legendre recurrence).
Rule1D gauss_legendre(int n);
Rule1D rule_1d(QuadratureSpec::Rule rule, int n, double a, double b);

struct TensorRule {
  PointSet nodes;
  std::vector<double> weights;
};

/// Tensor product rule over a box, last axis fastest.
TensorRule tensor_rule(QuadratureSpec::Rule rule, int n, const Box& box);

}  // namespace cvapprox
