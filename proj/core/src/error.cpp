#include "cvapprox/error.hpp"

namespace cvapprox {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::index: return "index";
    case ErrorKind::domain: return "domain";
    case ErrorKind::order: return "order";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::quadrature_convergence: return "quadrature_convergence";
    case ErrorKind::criterion_failure: return "criterion_failure";
    case ErrorKind::convergence_failure: return "convergence_failure";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::cover_defect: return "cover_defect";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

}  // namespace cvapprox
