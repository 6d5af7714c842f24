#include <benchmark/benchmark.h>

#include <vector>

#include "randcurv/excursion.hpp"
#include "randcurv/harmonics.hpp"
#include "randcurv/point_sets.hpp"
#include "randcurv/sampler.hpp"
#include "randcurv/spectral.hpp"

using namespace randcurv;

static void BM_RealHarmonics(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  std::vector<double> v(harmonic_count(L)), gt(v.size()), gp(v.size());
  const Vec3 x{0.3, -0.5, 0.812403840463596};
  for (auto _ : state) {
    real_harmonics(x, L, v.data(), gt.data(), gp.data());
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(v.size()));
}
BENCHMARK(BM_RealHarmonics)->Arg(4)->Arg(12)->Arg(32);

static void BM_SampleBlock(benchmark::State& state) {
  const auto spectrum = SpectrumModel::sphere2(12);
  const auto scheme = make_sphere_normalized(8.0, 12);
  const PointSet grid = fibonacci_sphere(static_cast<std::size_t>(state.range(0)));
  const SpectralSampler sampler(spectrum, scheme, grid, {false, true, false});
  const std::size_t block = 64;
  std::vector<double> h(grid.size() * block);
  std::uint64_t first = 0;
  for (auto _ : state) {
    sampler.sample_block(1, first, block, nullptr, h.data(), nullptr);
    first += block;
    benchmark::DoNotOptimize(h.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(block));
}
BENCHMARK(BM_SampleBlock)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void BM_EulerCount(benchmark::State& state) {
  const Triangulation mesh = icosphere(static_cast<int>(state.range(0)));
  const PointSet pts = mesh.as_point_set();
  const auto spectrum = SpectrumModel::sphere2(12);
  const SpectralSampler sampler(spectrum, make_sphere_normalized(8.0, 12), pts, {false, true, false});
  const std::vector<double> h = sampler.sample(1, 0).h;
  const EulerCounter counter(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(counter.count(h, 0.5));
}
BENCHMARK(BM_EulerCount)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
