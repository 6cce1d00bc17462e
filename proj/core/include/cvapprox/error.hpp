#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace cvapprox {

enum class ErrorKind {
  index,
  domain,
  order,
  precondition,
  quadrature_convergence,
  criterion_failure,
  convergence_failure,
  resolution,
  cover_defect,
  geometry,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Search failures carry the best value reached.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> achieved = std::nullopt)
      : std::runtime_error(what), kind_(kind), achieved_(achieved) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> achieved() const noexcept { return achieved_; }

 private:
  ErrorKind kind_;
  std::optional<double> achieved_;
};

}  // namespace cvapprox
