#pragma once

// Pinned numbers. The first block comes from the independent oracles in
// oracles.hpp and test_oracles.cpp regenerates it; the second block is
// regression pins of library outputs with no closed form.

#include <array>
#include <cstddef>

namespace fixture {

// integral of exp(-1/(1-|x|^2)) over the unit ball; adaptive Simpson, tol 1e-14
inline constexpr double kUnitBumpMass1D = 0.443993816168079;
inline constexpr double kUnitBumpMass2D = 0.46651239317833;

// sup |psi'| for K = [-1, 1], delta = 1 (d = 1): the peak 4 rho(0) of rho_4
inline constexpr double kCutoffC1 = 3.31427535947642;

// cut-off Gaussian (K = [-2, 2], delta = 1), Schwartz weights j = 1:
// |f - f * rho_n|_{1,l} for n = 2, 4, 8, 16, 32, scanned at step 0.001 with
// the convolution by adaptive quadrature
inline constexpr std::array<int, 5> kScales{2, 4, 8, 16, 32};
inline constexpr std::array<double, 5> kRegularizationL0{0.0379309550129643, 0.00977955328488844,
                                                         0.00246407269391458, 0.000617227401460863,
                                                         0.000154382587793878};
inline constexpr std::array<double, 5> kRegularizationL1{0.0836962855606765, 0.0217446914973834,
                                                         0.00548950944151972, 0.00243668369126135,
                                                         0.000889290574771424};
// library against the column above on the same 10x grid with the 256-point kernel rule
inline constexpr double kRegularizationRelTol = 1e-6;
// the default 64-point midpoint kernel misses unit mass by 1.3e-7, which
// shifts regularized values by up to that much times sup |f|
inline constexpr double kDefaultQuadValueFloor = 2e-7;
// first n with |f - f * rho_n|_{1,0} < 1e-2
inline constexpr int kCutGaussianN0 = 4;

// f(x) = x on K = [0, 1], step 0.01, Schwartz j = 1, eps 0.2: brute-force greedy count
inline constexpr std::size_t kLinearCoverCenters = 9;

// regression pins

// plane waves exp(-x^2) cos(s_q x), s_q = 0, 0.25, ..., 1.75, Schwartz j = 1
inline constexpr std::size_t kPlaneWaveRankEps020 = 23;
inline constexpr std::size_t kPlaneWaveRankEps005 = 97;

// schwartz_d1 scenario, eps = 0.1, a-priori tensor tolerance
inline constexpr std::size_t kSchwartzRank = 24993;
inline constexpr int kSchwartzN2 = 8;

}  // namespace fixture
