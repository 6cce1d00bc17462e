#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cvapprox/cutoff.hpp"
#include "cvapprox/finite_rank.hpp"
#include "cvapprox/mollifier.hpp"
#include "cvapprox/seminorms.hpp"

namespace cvapprox {

struct Cover {
  Region K;
  Region W;                  // K plus one cover cell (clipped to the support constraint)
  std::vector<double> step;  // cover lattice step
  int refine = 1;            // cover step = domain step / refine
  PointSet centers;
  std::vector<double> radii;
  double N_const = 1.0;
  double eps = 0.0;
  double target = 0.0;  // eps / N_const

  std::size_t size() const noexcept { return radii.size(); }
};

struct CoverOptions {
  std::optional<Region> support_constraint;
  int refine = 0;  // 0: pick from a Lipschitz estimate
  int max_refine = 64;
  std::size_t max_lattice_points = 4'000'000;
  std::size_t max_centers = 2'000'000;
};

/// Greedy farthest-point cover of K's lattice by balls on which the
/// p_alpha-oscillation of f stays below eps / N, N = 1 + sup nu_{j,0} on W.
/// A lattice point p counts as covered by (c, R) when |p - c| + sqrt(d) h < R.
Cover oscillation_cover(const SampledFunction& f, const Region& K, const WeightFamily& fam, int j,
                        const SeminormIndex& alpha, double eps, const CoverOptions& opt = {});

/// Smooth partition phi_i = theta b_i / sum_q b_q, b_i(x) = h(|x - x_i|^2 / R_i^2),
/// theta the cut-off of K with margin one cover cell.
class PartitionBank : public FactorBank {
 public:
  PartitionBank(const Cover& cover, const Region& domain, int max_deriv, const QuadratureSpec& quad);

  std::size_t size() const override { return radii_.size(); }
  int order() const override { return order_; }
  void nonzero(int order, std::span<const double> x, SparseBlock& out) const override;

  const CutoffFunction& theta() const noexcept { return theta_; }
  const PointSet& centers() const noexcept { return centers_; }
  double radius(std::size_t i) const { return radii_.at(i); }
  /// Bounding box of supp phi_i.
  Box support_box(std::size_t i) const;

 private:
  void candidates(std::span<const double> x, std::vector<std::size_t>& out) const;

  std::size_t d_;
  int order_;
  PointSet centers_;
  std::vector<double> radii_;
  CutoffFunction theta_;
  std::vector<double> blo_, bcell_;
  std::vector<std::size_t> bdims_;
  std::vector<std::vector<std::size_t>> buckets_;
};

/// Factors phi_i * rho_n, derivatives on the kernel.
class ConvolvedBank : public FactorBank {
 public:
  ConvolvedBank(std::shared_ptr<const FactorBank> inner, KernelTable table);

  std::size_t size() const override { return inner_->size(); }
  int order() const override { return table_.order; }
  void nonzero(int order, std::span<const double> x, SparseBlock& out) const override;

  const KernelTable& table() const noexcept { return table_; }

 private:
  std::shared_ptr<const FactorBank> inner_;
  KernelTable table_;
};

/// Single factor of a bank as a scalar function.
SampledFunction bank_factor(std::shared_ptr<const FactorBank> bank, std::size_t i, const Region& domain,
                            std::optional<Region> support);

std::vector<SampledFunction> build_partition(const Cover& cover, const Region& domain, int max_deriv,
                                             const QuadratureSpec& quad);

struct LocalizationReport {
  std::size_t n_centers = 0;
  std::size_t rank = 0;
  double N_const = 0.0;
  double eps = 0.0;
  double measured_error = 0.0;  // |f - g|_{j,0,alpha}
  bool four_eps_bound_ok = false;
  int refine = 1;
  Region K;
  TailCompact tail;
};

struct LocalizationResult {
  FiniteRankFunction g;
  std::shared_ptr<const PartitionBank> bank;
  Cover cover;
  LocalizationReport report;
};

/// k = 0 finite-rank approximation g = sum phi_i f(x_i) with |f - g|_{j,0,alpha} < 4 eps.
/// With a support constraint V every phi_i vanishes outside V.
LocalizationResult finite_rank_c0_approx(const SampledFunction& f, const WeightFamily& fam, int j,
                                         const SeminormIndex& alpha, double eps,
                                         const std::optional<Region>& support_constraint = std::nullopt,
                                         const QuadratureSpec& quad = {}, int max_deriv = 2,
                                         const CoverOptions& cover_opt = {});

}  // namespace cvapprox
