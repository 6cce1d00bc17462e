#include <benchmark/benchmark.h>

#include "cvapprox/convolution.hpp"
#include "cvapprox/mollifier.hpp"

using namespace cvapprox;

namespace {

Region line(double a, double b, double h) { return Region::on_lattice({Box{{a}, {b}}}, {a}, {h}); }

void BM_KernelTable(benchmark::State& state) {
  const Mollifier m = build_mollifier(static_cast<std::size_t>(state.range(0)), 8, {}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_table(m, QuadratureSpec{}, 2));
}
BENCHMARK(BM_KernelTable)->Arg(1)->Arg(2);

// one regularized block per grid point of [-4, 4]
void BM_RegularizeBlock(benchmark::State& state) {
  const Region dom = line(-4, 4, 0.01);
  const SampledFunction f = gaussian(dom, 2, std::vector<double>(static_cast<std::size_t>(state.range(0)), 1.0));
  const SampledFunction r = regularize(f, 8, {}, 2);
  std::vector<double> out(r.block_size(1));
  for (auto _ : state) {
    for (std::size_t p = 0; p < dom.grid_size(); ++p) r.block_unchecked(1, dom.grid()[p], out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * dom.grid_size()));
}
BENCHMARK(BM_RegularizeBlock)->Arg(1)->Arg(8);

}  // namespace
