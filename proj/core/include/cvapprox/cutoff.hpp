#pragma once

#include <optional>
#include <vector>

#include "cvapprox/quadrature.hpp"
#include "cvapprox/sampled_function.hpp"
#include "cvapprox/seminorms.hpp"

namespace cvapprox {

/// R(t) = int_{-inf}^t rho(s) ds for the one-dimensional unit mollifier,
/// and its derivatives R^(k) = rho^(k-1).
double mollified_step(double t);
double mollified_step_derivative(int k, double t);
/// Normalization of the one-dimensional mollifier used by the step table.
double mollified_step_normalization();

struct CutoffFunction {
  Region K;
  double delta = 0.0;
  double axis_delta = 0.0;  // delta / sqrt(d): per-axis margin
  int n = 0;                // mollifier scale ceil(4 / axis_delta)
  int max_deriv = 0;
  SampledFunction psi;
  std::vector<double> Cbeta;  // MultiIndexSet(d, max_deriv) order
  double normalization_gap = 0.0;  // |step normalization - quadrature normalization|

  double C(const MultiIndex& beta) const;
};

/// psi = 1 - prod_b (1 - psi_b) over the boxes of K, psi_b the product of
/// per-axis mollified indicators of the box inflated by axis_delta / 2.
/// psi = 1 on K inflated by axis_delta / 4 and vanishes outside K inflated
/// by 3 axis_delta / 4 (so inside the closed 3 delta / 4 ball neighbourhood).
CutoffFunction build_cutoff(const Region& domain, const Region& K, double delta, int max_deriv,
                            const QuadratureSpec& quad);

/// Re-measured sup |d^beta psi| delta^|beta| over the given points.
std::vector<double> measure_cbeta(const CutoffFunction& cut, const PointSet& pts);

/// max_{|beta| <= l} sum_{gamma <= beta} binom(beta, gamma) C_{beta-gamma} delta^-|beta-gamma|
double cutoff_constant(const CutoffFunction& cut, int l);

struct CutoffReport {
  TailCompact tail;
  double C_l_delta = 0.0;
  double target = 0.0;
  double measured = 0.0;  // |f - psi f|_{j,l,alpha}
  double bound = 0.0;     // (1 + C_l_delta) * tail
  int iterations = 0;
};

struct CutoffResult {
  SampledFunction f_tilde;
  CutoffFunction cut;
  CutoffReport report;
};

/// Tail compact for eps / (1 + C_{l,delta}), cut-off psi, f_tilde = psi f.
/// Rebuilds while the constant moves enough to break (1 + C) tail < eps.
CutoffResult apply_cutoff(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                          const SeminormIndex& alpha, double eps, double delta, const Region& search,
                          const QuadratureSpec& quad, double initial_constant = 0.0);

}  // namespace cvapprox
