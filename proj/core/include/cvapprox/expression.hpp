#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "cvapprox/jet.hpp"

namespace cvapprox {

struct ExpressionParams {
  double j = 0.0;
  double l = 0.0;
};

/// Small arithmetic language over the coordinates x1..xd.
///
///   numbers, x1..xd (x alone when d == 1), j, l, pi
///   + - * / ^ (right associative), unary minus, parentheses
///   exp log sqrt sin cos abs, |x| (Euclidean norm), |expr| (absolute value)
///   indicator(lo1, hi1, ..., lod, hid)   closed box membership
class Expression {
 public:
  using Params = ExpressionParams;

  Expression() = default;
  static Expression parse(std::string_view text, std::size_t dim);

  double eval(std::span<const double> x, const Params& p = {}) const;
  Jet eval(std::span<const double> x, const JetLayout& layout, const Params& p = {}) const;

  const std::string& text() const noexcept { return text_; }
  std::size_t dim() const noexcept { return dim_; }
  bool valid() const noexcept { return root_ != nullptr; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::size_t dim_ = 0;
};

}  // namespace cvapprox
