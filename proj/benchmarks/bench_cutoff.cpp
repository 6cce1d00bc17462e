#include <benchmark/benchmark.h>

#include "cvapprox/cutoff.hpp"

using namespace cvapprox;

namespace {

void BM_BuildCutoff1D(benchmark::State& state) {
  const Region dom = Region::on_lattice({Box{{-8}, {8}}}, {-8}, {0.01});
  const Region K = Region::on_lattice({Box{{-2}, {2}}}, {-8}, {0.01});
  for (auto _ : state) benchmark::DoNotOptimize(build_cutoff(dom, K, 1.0, static_cast<int>(state.range(0)), {}));
}
BENCHMARK(BM_BuildCutoff1D)->Arg(1)->Arg(2)->Arg(3);

void BM_BuildCutoffStrips(benchmark::State& state) {
  const std::vector<double> o{-6, -4.5}, h{0.05, 0.05};
  const Region dom = Region::on_lattice({Box{{-6, 0.125}, {6, 4.5}}, Box{{-6, -4.5}, {6, -0.125}}}, o, h);
  const Region K = Region::on_lattice({Box{{-3, 0.5}, {3, 2}}, Box{{-3, -2}, {3, -0.5}}}, o, h);
  for (auto _ : state) benchmark::DoNotOptimize(build_cutoff(dom, K, 0.25, 2, {}));
}
BENCHMARK(BM_BuildCutoffStrips);

}  // namespace
