#include <benchmark/benchmark.h>

#include "qdm/biot_savart.hpp"

namespace {

using namespace qdm;
using namespace qdm::field;

void BM_SegmentField(benchmark::State& state) {
  const Vec3 a{-1e-4, 0, 0}, b{1e-4, 0, 0}, p{3e-5, 4e-5, 5e-6};
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_field(a, b, 436e-9, p));
  }
}
BENCHMARK(BM_SegmentField);

void BM_RenderMap(benchmark::State& state) {
  SourceSet sources;
  sources.phantoms.push_back(serpentine_phantom());
  SensingGeometry g;
  g.width = static_cast<std::size_t>(state.range(0));
  g.height = g.width;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_map(sources, g));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RenderMap)->RangeMultiplier(2)->Range(16, 128)->Complexity();

}  // namespace
