#include <benchmark/benchmark.h>

#include "cvapprox/tensorapprox.hpp"
#include "cvapprox/weights.hpp"

using namespace cvapprox;

namespace {

void BM_OscillationCover(benchmark::State& state) {
  const Region dom = Region::on_lattice({Box{{-8}, {8}}}, {-8}, {0.01});
  const WeightFamily fam = schwartz_family(dom, 2, 2);
  const SampledFunction f = plane_waves(dom, 1, {0.0, 0.5, 1.0, 1.5});
  const Region K = Region::on_lattice({Box{{-2}, {2}}}, {-8}, {0.01});
  const double eps = 1.0 / static_cast<double>(state.range(0));
  std::size_t centers = 0;
  for (auto _ : state) {
    const Cover c = oscillation_cover(f, K, fam, 1, SeminormIndex::sup(), eps);
    centers = c.size();
    benchmark::DoNotOptimize(centers);
  }
  state.counters["centers"] = static_cast<double>(centers);
}
BENCHMARK(BM_OscillationCover)->Arg(5)->Arg(20)->Arg(80);

void BM_LocalizationPlaneWaves(benchmark::State& state) {
  const Region dom = Region::on_lattice({Box{{-8}, {8}}}, {-8}, {0.01});
  const WeightFamily fam = schwartz_family(dom, 2, 2);
  std::vector<double> nodes;
  for (int q = 0; q < 8; ++q) nodes.push_back(0.25 * q);
  const SampledFunction f = plane_waves(dom, 2, nodes);
  for (auto _ : state) benchmark::DoNotOptimize(finite_rank_c0_approx(f, fam, 1, SeminormIndex::sup(), 0.2));
}
BENCHMARK(BM_LocalizationPlaneWaves)->Unit(benchmark::kMillisecond);

}  // namespace
