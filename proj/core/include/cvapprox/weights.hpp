#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvapprox/expression.hpp"
#include "cvapprox/region.hpp"

namespace cvapprox {

struct WeightIndex {
  int j = 1;
  int l = 0;
  friend auto operator<=>(const WeightIndex&, const WeightIndex&) = default;
};

std::string to_string(const WeightIndex& idx);

enum class FamilyKind { schwartz, exhaustion, exp_strips, om_finite, custom };
const char* to_string(FamilyKind kind) noexcept;

/// Finite weight family nu_{j,l}, j in 1..j_max, l in 0..k_max, on a gridded domain.
class WeightFamily {
 public:
  using Evaluator = std::function<double(int j, int l, std::span<const double> x)>;
  /// nu_{j,l} = [x in omega_j] * smooth_{j,l}(x)
  struct Structure {
    std::vector<Region> omega;
    Evaluator smooth;
  };

  /// Empty family with no indices; assign a real one before use.
  WeightFamily() : kind_(FamilyKind::custom), k_max_(0), j_max_(0) {}
  WeightFamily(FamilyKind kind, Region domain, int k_max, int j_max, Evaluator eval,
               std::optional<Structure> structure = std::nullopt, bool monotone_in_l = false);

  FamilyKind kind() const noexcept { return kind_; }
  const Region& domain() const noexcept { return domain_; }
  std::size_t dim() const noexcept { return domain_.dim(); }
  int k_max() const noexcept { return k_max_; }
  int j_max() const noexcept { return j_max_; }
  bool monotone_in_l() const noexcept { return monotone_; }
  const std::optional<Structure>& structure() const noexcept { return structure_; }
  /// For om_finite chains: gauge set j is base * (1+|x|^2)^k, k < j.
  bool multiplier_chain() const noexcept { return chain_; }
  WeightFamily& set_multiplier_chain(bool v) {
    chain_ = v;
    return *this;
  }

  std::vector<WeightIndex> indices() const;
  void check_index(const WeightIndex& idx) const;
  double eval(const WeightIndex& idx, std::span<const double> x) const;
  double eval_unchecked(int j, int l, std::span<const double> x) const { return eval_(j, l, x); }

 private:
  FamilyKind kind_;
  Region domain_;
  int k_max_;
  int j_max_;
  Evaluator eval_;
  std::optional<Structure> structure_;
  bool monotone_ = false;
  bool chain_ = false;
};

/// (1 + |x|^2)^(l/2), independent of j.
WeightFamily schwartz_family(Region domain, int k_max, int j_max);
/// Indicator of the j-th member of a nested list of compacts.
WeightFamily exhaustion_family(Region domain, std::vector<Region> omegas, int k_max);
/// Strips 1/(j+1) < |x2| < j+1 with factor exp(-|x1|/(j+1)), d = 2.
WeightFamily exp_strips_family(Region domain, int k_max, int j_max);
/// max over gauge set j of |g(x)|, independent of l.
WeightFamily om_finite_family(Region domain, std::vector<std::vector<Expression>> gauge_sets, int k_max);
/// Gauge set j = {g (1+|x|^2)^k : g in base, k < j}.
WeightFamily om_finite_chain(Region domain, const std::vector<Expression>& base, int j_max, int k_max);
/// One expression per j; expressions may use the parameters j and l.
WeightFamily expression_family(Region domain, std::vector<Expression> per_j, int k_max);

// Audits.

struct DirectedPair {
  WeightIndex a, b;
  bool ok = false;
  WeightIndex dominant;
  double C = 0.0;
  std::vector<double> witness;  // failing point when !ok
};

struct DirectedReport {
  bool pass = true;
  std::size_t points = 0;
  std::vector<DirectedPair> pairs;
};

DirectedReport check_directed(const WeightFamily& fam, const Region& region);

struct BoundEntry {
  WeightIndex idx;
  double value = 0.0;
  std::vector<double> at;
};

struct LocalBoundReport {
  bool pass = true;
  std::size_t points = 0;
  std::vector<BoundEntry> sups;
};

LocalBoundReport check_locally_bounded(const WeightFamily& fam, const Region& K);

struct AwayFromZeroReport {
  bool pass = true;
  std::size_t points = 0;
  std::vector<BoundEntry> infs;  // one per l that has a positive-inf index
  std::vector<int> failing_l;
};

AwayFromZeroReport check_locally_bounded_away_from_zero(const WeightFamily& fam, const Region& K);

struct CenteredCompact {
  Region K;  // empty when the condition holds everywhere
  std::vector<double> half_widths;
  long long steps = 0;
};

/// Smallest centered box (clipped to `search`) outside of which
/// nu_jl <= eps nu_im at every grid point of the family domain.
std::optional<CenteredCompact> check_vanishing_ratio(const WeightFamily& fam, const WeightIndex& jl,
                                                     const WeightIndex& im, double eps, const Region& search,
                                                     std::span<const double> center = {});

/// Compact predicted by the closed forms of the built-in families, if any.
std::optional<Region> predicted_vanishing_compact(const WeightFamily& fam, const WeightIndex& jl,
                                                  const WeightIndex& im, double eps);

struct NonDegeneracyReport {
  bool pass = true;
  std::size_t points = 0;
  int failing_l = -1;
  std::vector<double> witness;
};

/// For each l and grid point of `region`, some j has nu_{j,l} > 0.
NonDegeneracyReport check_non_degenerate(const WeightFamily& fam, const Region& region);

struct ScanCheck {
  bool pass = true;
  double worst = 0.0;
  std::vector<double> witness;
  WeightIndex idx;
};

/// Values >= 0 everywhere, structure identity, monotonicity in l where declared.
ScanCheck check_nonnegative(const WeightFamily& fam, const Region& region);
ScanCheck check_structure(const WeightFamily& fam, const Region& region);
ScanCheck check_monotone(const WeightFamily& fam, const Region& region);

}  // namespace cvapprox
