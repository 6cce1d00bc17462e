#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cvapprox/mollifier.hpp"
#include "cvapprox/seminorm_index.hpp"
#include "cvapprox/seminorms.hpp"
#include "cvapprox/weights.hpp"

namespace cvapprox {

/// Nodes over the compact factor's support with that factor's derivative
/// block precomputed at each node.
struct IntegrationTable {
  std::size_t dim = 0;
  int order = 0;
  std::size_t width = 0;
  PointSet nodes;
  std::vector<double> w;  // weight * d^beta a(node), row per node
  Box support_box;        // bounding box of the compact factor's support
};

IntegrationTable integration_table(const SampledFunction& a, const QuadratureSpec& quad);
IntegrationTable integration_table(const KernelTable& k, double radius);

/// (a * b)(x) = sum_q w_q a(y_q) b(x - y_q) for a table of the compact
/// factor a; derivatives land on a. Output domain is b's domain inflated by
/// a's support extent; declared support is the box Minkowski sum when b
/// declares one.
SampledFunction convolve_with_table(std::shared_ptr<const IntegrationTable> table, const SampledFunction& b);

/// f * g for scalar g; at least one factor needs a declared support.
/// The factor with the smaller support box carries the quadrature.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g, const QuadratureSpec& quad);

/// max over sample points of the sup-norm gap between the two orientations,
/// the second one computed with the alternate rule around each point.
double commutativity_check(const SampledFunction& f, const SampledFunction& g, const QuadratureSpec& quad,
                           const PointSet& sample_points);

struct TransferReport {
  double fd_vs_kernel = 0.0;      // (a) vs (b)
  double fd_vs_function = 0.0;    // (a) vs (c)
  double kernel_vs_function = 0.0;  // (b) vs (c)
  double scale = 0.0;             // largest |value| seen, for relative reading
};

/// Compares (a) finite differences of f*rho_n, (b) f * d^beta rho_n,
/// (c) (d^beta f) * rho_n at the sample points.
TransferReport derivative_transfer_check(const SampledFunction& f, const Mollifier& moll, const MultiIndex& beta,
                                         const PointSet& sample_points, const QuadratureSpec& quad, double fd_step);

/// f * rho_n with order moll.max_deriv and support inflated by 1/n.
SampledFunction regularize(const SampledFunction& f, const Mollifier& moll, const QuadratureSpec& quad);
SampledFunction regularize(const SampledFunction& f, int n, const QuadratureSpec& quad, int max_deriv);

struct RegularizationOrder {
  int n = 0;
  double value = 0.0;
  std::vector<std::pair<int, double>> history;  // (n, |f - f*rho_n|)
};

/// Smallest n in 2, 4, ..., n_max with |f - f*rho_n|_{j,l,alpha} < eps.
RegularizationOrder find_regularization_order(const SampledFunction& f, const WeightFamily& fam,
                                              const WeightIndex& idx, const SeminormIndex& alpha, double eps,
                                              int n_max, const QuadratureSpec& quad);

}  // namespace cvapprox
