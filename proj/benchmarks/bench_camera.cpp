#include <benchmark/benchmark.h>

#include "qdm/camera.hpp"

namespace {

using namespace qdm;
using namespace qdm::camera;

void BM_ExposeFrames(benchmark::State& state) {
  CameraConfig cfg;
  FieldMap pattern(64, 64, 1.9e-6, 1e-9);
  const auto frames = static_cast<std::size_t>(state.range(0));
  ExposureSeries series{pattern,
                        std::vector<double>(frames * static_cast<std::size_t>(cfg.n_cycles), 1.0)};
  NoiseSettings noise;
  noise.rng = CounterRng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expose_frames(series, 2.9e7, cfg, noise));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames) * 64 * 64);
}
BENCHMARK(BM_ExposeFrames)->Arg(50)->Arg(200);

void BM_PoissonDraw(benchmark::State& state) {
  const CounterRng rng(3);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(4e4, 0, i++));
  }
}
BENCHMARK(BM_PoissonDraw);

}  // namespace
