#include <gtest/gtest.h>

#include <cmath>

#include "cvapprox/error.hpp"
#include "cvapprox/seminorms.hpp"
#include "cvapprox/tensorapprox.hpp"
#include "cvapprox/weights.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cvapprox;
using testing_support::line;
using testing_support::on;

namespace {

struct Line {
  Region dom = line(-8, 8, 0.01);
  WeightFamily fam = schwartz_family(dom, 2, 2);
  SeminormIndex sup = SeminormIndex::sup();
};

std::vector<double> wave_nodes() {
  std::vector<double> s;
  for (int q = 0; q < 8; ++q) s.push_back(0.25 * q);
  return s;
}

Cover linear_cover(const Line& s, int refine) {
  const SampledFunction xe = from_expressions(s.dom, 1, std::vector<std::string>{"x"});
  CoverOptions o;
  o.refine = refine;
  return oscillation_cover(xe, on(s.dom, 0, 1), s.fam, 1, s.sup, 0.2, o);
}

// Partition identities on the K grid, range everywhere on the domain grid,
// and support inside the ball of each center.
void check_partition(const PartitionBank& bank, const Region& K, const Region& dom) {
  SparseBlock blk;
  for (std::size_t p = 0; p < K.grid_size(); ++p) {
    bank.nonzero(0, K.grid()[p], blk);
    double sum = 0.0;
    for (std::size_t t = 0; t < blk.size(); ++t) sum += blk.values[t];
    ASSERT_NEAR(sum, 1.0, 1e-12) << "at " << K.grid()[p][0];
  }
  for (std::size_t p = 0; p < dom.grid_size(); ++p) {
    const auto x = dom.grid()[p];
    bank.nonzero(0, x, blk);
    for (std::size_t t = 0; t < blk.size(); ++t) {
      const double v = blk.values[t];
      ASSERT_GE(v, -1e-14);
      ASSERT_LE(v, 1.0);
      if (v != 0.0) ASSERT_LT(distance(x, bank.centers()[blk.index[t]]), bank.radius(blk.index[t]));
    }
  }
}

}  // namespace

TEST(Cover, ConstantAndZeroNeedOneCenter) {
  Line s;
  const Region K = on(s.dom, -1, 1);
  const Cover c = oscillation_cover(constant_function(s.dom, 1, {2.0, -1.0}), K, s.fam, 1, s.sup, 0.1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c.radii[0], c.W.diameter(), 1e-12);
  EXPECT_EQ(oscillation_cover(zero_function(s.dom, 1, 1), K, s.fam, 1, s.sup, 0.1).size(), 1u);
}

TEST(Cover, LinearFunctionAgainstBruteForceGreedy) {
  Line s;
  for (int refine : {1, 4}) {
    const Cover c = linear_cover(s, refine);
    EXPECT_EQ(c.size(), fixture::kLinearCoverCenters) << refine;
    // unit Lipschitz constant: radius about target, at least 1 / (2 target) centers
    EXPECT_GE(c.size(), static_cast<std::size_t>(std::ceil(0.5 / c.target)));
    EXPECT_NEAR(c.N_const, 2.0, 1e-12);

    const double h = 0.01 / refine;
    std::vector<double> nodes;
    std::vector<char> in_k;
    const long long k0 = std::llround((-0.01 + 8.0) / h), k1 = std::llround((1.01 + 8.0) / h);
    for (long long k = k0; k <= k1; ++k) {
      const double x = -8.0 + static_cast<double>(k) * h;
      nodes.push_back(x);
      in_k.push_back(x >= -1e-9 && x <= 1.0 + 1e-9);
    }
    const auto g = oracle::greedy_cover_1d(nodes, in_k, [](double a, double b) { return std::abs(a - b); },
                                           c.target, h);
    ASSERT_EQ(g.centers.size(), c.size()) << refine;
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_NEAR(c.centers[i][0], g.centers[i], 1e-12);
      EXPECT_NEAR(c.radii[i], g.radii[i], 1e-9);
    }
  }
}

TEST(Cover, OscillationBelowTargetInsideEachBall) {
  Line s;
  const Cover c = linear_cover(s, 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t p = 0; p < c.W.grid_size(); ++p) {
      // distances on the cover lattice, values of f(x) = x at the nodes
      const double x = c.W.grid()[p][0], xc = c.centers[i][0];
      const double dist = std::abs(static_cast<double>(std::llround((x - xc) / c.step[0]))) * c.step[0];
      if (dist < c.radii[i]) EXPECT_LT(std::abs(x - xc), c.target) << "center " << xc << " node " << x;
    }
  }
}

TEST(Cover, RadiusBelowResolution) {
  Line s;
  const SampledFunction steep = from_expressions(s.dom, 1, std::vector<std::string>{"1000*x"});
  CoverOptions o;
  o.refine = 1;
  try {
    oscillation_cover(steep, on(s.dom, 0, 1), s.fam, 1, s.sup, 0.2, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
}

TEST(Partition, IdentitiesOnLinearCover) {
  Line s;
  for (int refine : {1, 4}) {
    const Cover c = linear_cover(s, refine);
    const PartitionBank bank(c, s.dom, 2, {});
    check_partition(bank, c.K, s.dom);
  }
}

TEST(Partition, SingleCenterIsTheCutoff) {
  Line s;
  const Cover c = oscillation_cover(constant_function(s.dom, 1, {1.0}), on(s.dom, -1, 1), s.fam, 1, s.sup, 0.1);
  const PartitionBank bank(c, s.dom, 2, {});
  ASSERT_EQ(bank.size(), 1u);
  SparseBlock blk;
  for (std::size_t p = 0; p < s.dom.grid_size(); p += 3) {
    const auto x = s.dom.grid()[p];
    bank.nonzero(0, x, blk);
    const double theta = bank.theta().psi.value(x)[0];
    const double phi = blk.size() ? blk.values[0] : 0.0;
    EXPECT_NEAR(phi, theta, 1e-14);
  }
}

TEST(Partition, FactorsMatchBank) {
  Line s;
  const Cover c = linear_cover(s, 1);
  const auto factors = build_partition(c, s.dom, 2, {});
  const PartitionBank bank(c, s.dom, 2, {});
  ASSERT_EQ(factors.size(), c.size());
  SparseBlock blk;
  for (double x : {-0.005, 0.2, 0.5, 0.93}) {
    const double xs[] = {x};
    bank.nonzero(0, xs, blk);
    std::vector<double> dense(factors.size(), 0.0);
    for (std::size_t t = 0; t < blk.size(); ++t) dense[blk.index[t]] = blk.values[t];
    for (std::size_t i = 0; i < factors.size(); ++i) EXPECT_EQ(factors[i].value(xs)[0], dense[i]);
  }
}

TEST(Localization, ZeroAndRankOne) {
  Line s;
  const auto z = finite_rank_c0_approx(zero_function(s.dom, 2, 2), s.fam, 1, s.sup, 0.1);
  EXPECT_EQ(z.report.measured_error, 0.0);
  EXPECT_TRUE(z.report.four_eps_bound_ok);
  // phi (x) e with phi a Gaussian: every vector is a multiple of e
  const auto r = finite_rank_c0_approx(gaussian(s.dom, 2, {1.0, -2.0}), s.fam, 1, s.sup, 0.1);
  EXPECT_LT(r.report.measured_error, 0.4);
  for (std::size_t i = 0; i < r.g.rank(); ++i) EXPECT_NEAR(r.g.vector(i)[1], -2.0 * r.g.vector(i)[0], 1e-15);
}

TEST(Localization, PlaneWaveFixtures) {
  Line s;
  const SampledFunction pw = plane_waves(s.dom, 2, wave_nodes());
  const std::pair<double, std::size_t> cases[] = {{0.2, fixture::kPlaneWaveRankEps020},
                                                  {0.05, fixture::kPlaneWaveRankEps005}};
  for (const auto& [eps, rank] : cases) {
    const auto r = finite_rank_c0_approx(pw, s.fam, 1, s.sup, eps);
    EXPECT_EQ(r.report.rank, rank) << eps;
    EXPECT_LT(r.report.measured_error, 4 * eps);
    EXPECT_TRUE(r.report.four_eps_bound_ok);
    check_partition(*r.bank, r.report.K, s.dom);
  }
}

TEST(Localization, InterpolatesAtIsolatedCenters) {
  // g(x_i) = sum_q phi_q(x_i) f(x_q); where only phi_i is alive, g(x_i) = f(x_i)
  Line s;
  const SampledFunction pw = plane_waves(s.dom, 2, wave_nodes());
  const auto r = finite_rank_c0_approx(pw, s.fam, 1, s.sup, 0.2);
  SparseBlock blk;
  int checked = 0;
  for (std::size_t i = 0; i < r.g.rank(); ++i) {
    const auto x = r.cover.centers[i];
    r.bank->nonzero(0, x, blk);
    if (blk.size() != 1) continue;
    ++checked;
    const auto gv = r.g.value(x), fv = pw.value(x);
    for (std::size_t c = 0; c < gv.size(); ++c) EXPECT_NEAR(gv[c], fv[c] * blk.values[0], 1e-12);
  }
  SUCCEED() << checked << " isolated centers";
}

TEST(Localization, SupportConstraintKeepsFactorsInside) {
  Line s;
  const SampledFunction pw = plane_waves(s.dom, 2, wave_nodes());
  const Region V = on(s.dom, -3, 3);
  const auto r = finite_rank_c0_approx(pw, s.fam, 1, s.sup, 0.2, V);
  EXPECT_LT(r.report.measured_error, 0.8);
  SparseBlock blk;
  for (std::size_t p = 0; p < s.dom.grid_size(); ++p) {
    const auto x = s.dom.grid()[p];
    if (V.contains(x)) continue;
    r.bank->nonzero(0, x, blk);
    for (double v : blk.values) ASSERT_EQ(v, 0.0) << x[0];
  }
  for (std::size_t i = 0; i < r.bank->size(); ++i) {
    const Box b = r.bank->support_box(i);
    EXPECT_GE(b.lo[0], -3.0 - 1e-9);
    EXPECT_LE(b.hi[0], 3.0 + 1e-9);
  }
}

TEST(Localization, ThinConstraintIsGeometryError) {
  Line s;
  try {
    finite_rank_c0_approx(gaussian(s.dom, 2, {1.0}), s.fam, 1, s.sup, 0.2, on(s.dom, 0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::geometry);
  }
}

// Invariants

TEST(LocalizationProperty, ScalingTheTargetScalesTheVectors) {
  Line s;
  const SampledFunction pw = plane_waves(s.dom, 2, {0.0, 1.0});
  const auto a = finite_rank_c0_approx(pw, s.fam, 1, s.sup, 0.2);
  const auto b = finite_rank_c0_approx(linear_combination(2.0, pw, 0.0, pw), s.fam, 1, s.sup, 0.4);
  ASSERT_EQ(a.g.rank(), b.g.rank());
  for (std::size_t i = 0; i < a.g.rank(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(b.g.vector(i)[c], 2.0 * a.g.vector(i)[c], 1e-14);
  }
}
