#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvapprox/error.hpp"
#include "cvapprox/finite_rank.hpp"
#include "cvapprox/mollifier.hpp"
#include "cvapprox/multiindex.hpp"
#include "cvapprox/sampled_function.hpp"
#include "cvapprox/seminorm_index.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cvapprox;
using testing_support::line;

namespace {

SampledFunction scalar_expr(const Region& dom, int order, const char* text) {
  return from_expressions(dom, order, std::vector<std::string>{text});
}

// value-only function: derivatives come from the finite-difference provider
SampledFunction fd_only(const Region& dom, int order, double (*fn)(double)) {
  return SampledFunction(dom, order, 1, [fn](std::span<const double> x, std::span<double> out) { out[0] = fn(x[0]); });
}

}  // namespace

TEST(MultiIndex, Binomials) {
  EXPECT_EQ(multiindex_binom(MultiIndex{2, 1}, MultiIndex{1, 1}), 2u);
  EXPECT_EQ(multiindex_binom(MultiIndex{2, 3}, MultiIndex{2, 3}), 1u);
  EXPECT_EQ(multiindex_binom(MultiIndex{3, 0}, MultiIndex{1, 0}), 3u);
  try {
    multiindex_binom(MultiIndex{1, 0}, MultiIndex{0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(MultiIndex, GradedOrder) {
  const MultiIndexSet& s = MultiIndexSet::get(2, 2);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s[1], (MultiIndex{1, 0}));
  EXPECT_EQ(s[2], (MultiIndex{0, 1}));
  EXPECT_EQ(s.count_up_to(1), 3u);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.index_of(s[i]), i);
  EXPECT_EQ(s.index_of(MultiIndex{3, 0}), MultiIndexSet::npos);
}

TEST(Evaluate, ConstantHasZeroDerivatives) {
  const Region dom = line(-2, 2, 0.01);
  const SampledFunction c = constant_function(dom, 2, {1.5, -2.0});
  const std::vector<double> x{0.3};
  EXPECT_EQ(c.evaluate(MultiIndex{0}, x), (std::vector<double>{1.5, -2.0}));
  EXPECT_EQ(c.evaluate(MultiIndex{1}, x), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(c.evaluate(MultiIndex{2}, x), (std::vector<double>{0.0, 0.0}));
}

TEST(Evaluate, GaussianFirstDerivative) {
  const Region dom = line(-3, 3, 0.01);
  const SampledFunction g = gaussian(dom, 2, {1.0, 3.0});
  for (double t : {-1.3, 0.0, 0.7}) {
    const std::vector<double> x{t};
    const auto v = g.evaluate(MultiIndex{1}, x);
    EXPECT_NEAR(v[0], -2 * t * std::exp(-t * t), 1e-14);
    EXPECT_NEAR(v[1], -6 * t * std::exp(-t * t), 1e-14);
  }
}

TEST(Evaluate, FiniteDifferenceProviderSquare) {
  const Region dom = line(-1, 1, 0.01);
  const SampledFunction f = fd_only(dom, 2, [](double t) { return t * t; });
  ASSERT_EQ(f.provider(), SampledFunction::Provider::finite_difference);
  const std::vector<double> x{0.3};
  const double got = f.evaluate(MultiIndex{2}, x)[0];
  // reference: step sweep of the independent central-difference oracle
  const oracle::Sweep s = oracle::fd_sweep([](double t) { return t * t; }, 0.3, 2, 1e-2);
  EXPECT_NEAR(s.richardson, 2.0, 1e-8);
  EXPECT_NEAR(got, s.richardson, 1e-6);
}

TEST(Evaluate, Errors) {
  const Region dom = line(-1, 1, 0.01);
  const SampledFunction g = gaussian(dom, 1, {1.0});
  const std::vector<double> x{0.0}, far{3.0};
  try {
    g.evaluate(MultiIndex{2}, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::order);
  }
  try {
    g.evaluate(MultiIndex{0}, far);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(ProductRule, Cases) {
  const Region dom = line(-2, 2, 0.01);
  const SampledFunction f = gaussian(dom, 2, {1.0, -2.0});
  const SampledFunction one = constant_function(dom, 2, {1.0});
  const SampledFunction x_fn = scalar_expr(dom, 2, "x");
  const std::vector<double> x{0.5};
  // g == 1 reproduces the derivative of f
  for (int k = 0; k <= 2; ++k) {
    EXPECT_EQ(product_rule_apply(one, f, MultiIndex{k}, x), f.evaluate(MultiIndex{k}, x));
  }
  // f constant: g' e
  const SampledFunction e = constant_function(dom, 2, {2.0, 3.0});
  const SampledFunction s = scalar_expr(dom, 2, "sin(x)");
  const auto d1 = product_rule_apply(s, e, MultiIndex{1}, x);
  EXPECT_NEAR(d1[0], 2.0 * std::cos(0.5), 1e-15);
  EXPECT_NEAR(d1[1], 3.0 * std::cos(0.5), 1e-15);
  // g = x, f = exp(-x^2) e, beta = 2 against the finite-difference oracle
  const auto d2 = product_rule_apply(x_fn, f, MultiIndex{2}, x);
  const oracle::Sweep sw = oracle::fd_sweep([](double t) { return t * std::exp(-t * t); }, 0.5, 2, 1e-3);
  EXPECT_NEAR(d2[0], sw.richardson, 1e-4 * std::abs(sw.richardson));
  EXPECT_NEAR(d2[1], -2.0 * sw.richardson, 2e-4 * std::abs(sw.richardson));
}

TEST(FdOracle, Examples) {
  const Region dom = line(-2, 2, 0.01);
  const SampledFunction cube = scalar_expr(dom, 2, "x^3");
  const std::vector<double> one{1.0};
  EXPECT_NEAR(fd_derivative_oracle(cube, MultiIndex{1}, one, 1e-4)[0], 3.0, 1e-7);
  const SampledFunction lin = scalar_expr(dom, 2, "3*x - 1");
  EXPECT_NEAR(fd_derivative_oracle(lin, MultiIndex{2}, one, 1e-3)[0], 0.0, 1e-6);
  const SampledFunction s = scalar_expr(dom, 2, "sin(x)");
  const std::vector<double> zero{0.0};
  EXPECT_NEAR(fd_derivative_oracle(s, MultiIndex{1}, zero, 1e-4)[0], 1.0, 1e-8);
  // second-order convergence seen by the step sweep
  const oracle::Sweep sw = oracle::fd_sweep([](double t) { return std::sin(t); }, 0.0, 1, 1e-1);
  EXPECT_NEAR(sw.observed_order, 2.0, 0.05);
  // stencil leaving the domain
  const std::vector<double> edge{1.9999};
  try {
    fd_derivative_oracle(s, MultiIndex{1}, edge, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(SupportEstimate, Examples) {
  const Region dom = line(-3, 3, 0.01);
  const SampledFunction bump = scalar_expr(dom, 1, "exp(-1/(1 - x^2)) * indicator(-0.999999, 0.999999)");
  const Region s = support_estimate(bump);
  ASSERT_FALSE(s.empty());
  const Box b = s.bounding_box();
  EXPECT_GE(b.lo[0], -1.0 - 0.01 - 1e-12);
  EXPECT_LE(b.hi[0], 1.0 + 0.01 + 1e-12);

  EXPECT_TRUE(support_estimate(zero_function(dom, 1, 2)).empty());

  const Mollifier rho2 = build_mollifier(1, 2, {}, 2);
  const Box r = support_estimate(rho2.as_function(dom)).bounding_box();
  // the estimate lands on the last grid point above the threshold, inside the true support
  EXPECT_NEAR(r.lo[0], -0.5, 0.01 + 1e-9);
  EXPECT_NEAR(r.hi[0], 0.5, 0.01 + 1e-9);
}

TEST(FiniteRank, EvaluatesSumOfTerms) {
  const Region dom = line(-2, 2, 0.01);
  const FiniteRankFunction g(dom, 2, 1, {gaussian(dom, 1, {1.0}), scalar_expr(dom, 1, "x")},
                             {{1.0, 0.0}, {2.0, -1.0}});
  EXPECT_EQ(g.rank(), 2u);
  const std::vector<double> x{0.4};
  const auto v = g.value(x);
  EXPECT_NEAR(v[0], std::exp(-0.16) + 0.8, 1e-15);
  EXPECT_NEAR(v[1], -0.4, 1e-15);
}

// Invariants

TEST(FuncmodelProperty, AnalyticMatchesFdOracle) {
  const Region dom = Region::box({-2, -2}, {2, 2}, {81, 81});
  const SampledFunction f = from_expressions(dom, 2, std::vector<std::string>{"exp(-x1^2 - 0.5*x2^2)*cos(x1 + x2)", "x1*x2^2 + sin(x2)"});
  const auto& set = MultiIndexSet::get(2, 2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> x{u(rng), u(rng)};
    const MultiIndex& beta = set[pick(rng)];
    const auto a = f.evaluate(beta, x);
    const auto o = fd_derivative_oracle(f, beta, x, 1e-3);
    for (std::size_t c = 0; c < a.size(); ++c) {
      EXPECT_NEAR(a[c], o[c], 1e-4 * std::max(1.0, std::abs(a[c]))) << beta.str();
    }
  }
}

TEST(FuncmodelProperty, ZeroOrderEqualsEvaluator) {
  const Region dom = line(-2, 2, 0.05);
  const SampledFunction f = plane_waves(dom, 2, {0.0, 1.0, 2.5});
  const auto& g = dom.grid();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(f.evaluate(MultiIndex{0}, g[i]), f.value(g[i]));
}

TEST(FuncmodelProperty, SeminormAxioms) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const std::vector<SeminormIndex> alphas{SeminormIndex::sup(), SeminormIndex::subset({0, 2}),
                                          SeminormIndex::weighted({1.0, 0.5, 2.0, 0.1})};
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(4), w(4), s(4), lv(4);
    const double lambda = 3.0 * n01(rng);
    for (std::size_t c = 0; c < 4; ++c) {
      v[c] = n01(rng);
      w[c] = n01(rng);
      s[c] = v[c] + w[c];
      lv[c] = lambda * v[c];
    }
    for (const auto& p : alphas) {
      EXPECT_GE(p(v), 0.0);
      EXPECT_NEAR(p(lv), std::abs(lambda) * p(v), 1e-15 * (1 + std::abs(lambda) * p(v)));
      EXPECT_LE(p(s), p(v) + p(w) + 1e-15);
      EXPECT_EQ(p.distance(v, w), p(std::vector<double>{v[0] - w[0], v[1] - w[1], v[2] - w[2], v[3] - w[3]}));
    }
  }
}

TEST(FuncmodelProperty, FiniteRankLinearInVectors) {
  const Region dom = line(-2, 2, 0.05);
  const FiniteRankFunction g(dom, 2, 2, {gaussian(dom, 2, {1.0}), scalar_expr(dom, 2, "sin(3*x)")},
                             {{1.0, 0.25}, {-2.0, 0.5}});
  const FiniteRankFunction h = g.scaled(0.5);  // power of two: exact
  std::vector<double> bg(3 * 2), bh(3 * 2);
  const auto& pts = dom.grid();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    g.block(2, pts[i], bg);
    h.block(2, pts[i], bh);
    for (std::size_t k = 0; k < bg.size(); ++k) ASSERT_EQ(bh[k], 0.5 * bg[k]);
  }
}

TEST(FuncmodelProperty, ProductRuleOrderZeroIsProduct) {
  const Region dom = line(-2, 2, 0.05);
  const SampledFunction g = scalar_expr(dom, 2, "cos(x) + 2");
  const SampledFunction f = plane_waves(dom, 2, {0.5, 1.5});
  const auto& pts = dom.grid();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = product_rule_apply(g, f, MultiIndex{0}, pts[i]);
    const double gv = g.value(pts[i])[0];
    const auto fv = f.value(pts[i]);
    for (std::size_t c = 0; c < fv.size(); ++c) ASSERT_EQ(p[c], gv * fv[c]);
  }
}
