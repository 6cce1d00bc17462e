#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "oracles.hpp"

// Every oracle-derived fixture regenerates from the oracles alone. A change
// to an oracle or a fixture that breaks the pairing fails here.

TEST(OracleSelfCheck, AdaptiveSimpsonKnownIntegrals) {
  EXPECT_NEAR(oracle::adaptive_simpson([](double x) { return std::exp(-x * x); }, -3, 3, 1e-14),
              std::sqrt(std::numbers::pi) * std::erf(3.0), 1e-13);
  EXPECT_NEAR(oracle::adaptive_simpson([](double x) { return std::sin(x); }, 0, std::numbers::pi, 1e-14), 2.0, 1e-13);
}

TEST(OracleSelfCheck, FdSweepIsSecondOrder) {
  const auto s = oracle::fd_sweep([](double x) { return std::sin(3 * x); }, 0.4, 1, 1e-2);
  EXPECT_NEAR(s.observed_order, 2.0, 0.05);
  EXPECT_NEAR(s.richardson, 3 * std::cos(1.2), 1e-8);
  const auto s2 = oracle::fd_sweep([](double x) { return std::sin(3 * x); }, 0.4, 2, 1e-2);
  EXPECT_NEAR(s2.observed_order, 2.0, 0.05);
}

TEST(OracleSelfCheck, UnitStepIsTheRunningIntegral) {
  const oracle::UnitStep st;
  EXPECT_NEAR(st.S(0.0), 0.5, 1e-14);
  for (double t : {-0.7, -0.2, 0.35, 0.9}) {
    const double want = oracle::adaptive_simpson([&](double s) { return st.rho(s); }, -1.0, t, 1e-15);
    EXPECT_NEAR(st.S(t), want, 1e-13);
    EXPECT_NEAR(st.rho_prime(t), oracle::central([&](double s) { return st.rho(s); }, t, 1, 1e-5), 1e-8);
  }
}

TEST(OracleRegeneration, BumpMasses) {
  EXPECT_NEAR(oracle::unit_bump_mass(1, 1e-14), fixture::kUnitBumpMass1D, 1e-14);
  EXPECT_NEAR(oracle::unit_bump_mass(2, 1e-14), fixture::kUnitBumpMass2D, 1e-14);
}

TEST(OracleRegeneration, CutoffSlopeConstant) {
  const oracle::UnitStep st;
  // psi' = 4 rho(4 t) on the ramp; scan it on a 10x grid
  const auto scan = oracle::scan_max([&](double t) { return 4.0 * st.rho(4.0 * t); }, -0.25, 0.25, 5000);
  EXPECT_NEAR(scan.value, fixture::kCutoffC1, 1e-12);
  EXPECT_NEAR(4.0 / std::exp(1.0) / fixture::kUnitBumpMass1D, fixture::kCutoffC1, 1e-13);
}

TEST(OracleRegeneration, RegularizationColumn) {
  const oracle::UnitStep st;
  const oracle::CutGaussian f{st};
  int n0 = 0;
  for (int l = 0; l <= 1; ++l) {
    for (std::size_t s = 0; s < fixture::kScales.size(); ++s) {
      const int n = fixture::kScales[s];
      const double v = oracle::regularization_gap(f, n, l, 3.3, 0.001);
      const double pinned = (l == 0 ? fixture::kRegularizationL0 : fixture::kRegularizationL1)[s];
      EXPECT_NEAR(v, pinned, 1e-9 * pinned) << "l=" << l << " n=" << n;
      if (l == 0 && n0 == 0 && v < 1e-2) n0 = n;
    }
  }
  EXPECT_EQ(n0, fixture::kCutGaussianN0);
}

TEST(OracleRegeneration, LinearCoverCount) {
  // f(x) = x on [0, 1]: N = 1 + sup (1 + x^2)^0 = 2, target eps / N = 0.1
  const double h = 0.01;
  std::vector<double> nodes;
  std::vector<char> in_k;
  for (long long k = 799; k <= 901; ++k) {
    const double x = -8.0 + static_cast<double>(k) * h;
    nodes.push_back(x);
    in_k.push_back(x >= -1e-9 && x <= 1.0 + 1e-9);
  }
  const auto g = oracle::greedy_cover_1d(nodes, in_k, [](double a, double b) { return std::abs(a - b); }, 0.1, h);
  EXPECT_EQ(g.centers.size(), fixture::kLinearCoverCenters);
}
