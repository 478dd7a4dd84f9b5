#include <benchmark/benchmark.h>

#include "qdm/denoise.hpp"
#include "qdm/pipeline.hpp"
#include "qdm/rng.hpp"

namespace {

using namespace qdm;

FieldMap noisy_map(std::size_t n) {
  const CounterRng rng(5);
  FieldMap m(n, n, 1.9e-6);
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = 1e-10 * rng.normal(i, 0);
  return m;
}

void BM_NlmDenoise(benchmark::State& state) {
  const FieldMap m = noisy_map(static_cast<std::size_t>(state.range(0)));
  denoise::NLMParams p;
  p.h = 0.5e-10;
  p.sigma_est = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(denoise::nlm_denoise(m, p));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NlmDenoise)->RangeMultiplier(2)->Range(32, 128)->Complexity();

void BM_GaussianHighpass(benchmark::State& state) {
  const FieldMap m = noisy_map(142);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pipeline::highpass_gaussian(m, 18e-6));
  }
}
BENCHMARK(BM_GaussianHighpass);

}  // namespace
