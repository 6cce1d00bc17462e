#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cvapprox/sampled_function.hpp"
#include "cvapprox/seminorm_index.hpp"
#include "cvapprox/weights.hpp"

namespace cvapprox {

struct SeminormValue {
  double value = 0.0;
  bool has_witness = false;
  std::vector<double> witness_x;
  MultiIndex witness_beta;
};

/// p_alpha(d^beta f(x)) nu_{j,l}(x), with the derivative block taken at order l.
double seminorm_integrand(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                          const SeminormIndex& alpha, std::span<const double> x, const MultiIndex& beta);

/// Sup over the given points and |beta| <= l; `skip` excludes points.
SeminormValue weighted_sup(const SampledFunction& f, const PointSet& pts, const WeightFamily& fam,
                           const WeightIndex& idx, const SeminormIndex& alpha, const Region* skip = nullptr);

SeminormValue weighted_seminorm(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                                const SeminormIndex& alpha);
/// Same sup over grid points of f's domain outside K.
SeminormValue tail_seminorm(const SampledFunction& f, const Region& K, const WeightFamily& fam,
                            const WeightIndex& idx, const SeminormIndex& alpha);
/// Unweighted sup over K's grid and |beta| <= l.
SeminormValue local_sup_seminorm(const SampledFunction& f, const Region& K, int l, const SeminormIndex& alpha);

struct TailCompact {
  Region K;
  std::vector<double> half_widths;
  long long steps = 0;
  SeminormValue tail;
};

/// Smallest centered box (one grid step per side per stage, clipped to
/// `search`) with tail below eps and K + delta inside the gridded domain.
/// Throws criterion_failure carrying the best tail reached.
TailCompact find_tail_compact(const SampledFunction& f, const WeightFamily& fam, const WeightIndex& idx,
                              const SeminormIndex& alpha, double eps, double delta, const Region& search,
                              std::span<const double> center = {});

}  // namespace cvapprox
