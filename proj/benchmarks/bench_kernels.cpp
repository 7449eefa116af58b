#include <eon/compressed.hpp>
#include <eon/encoder.hpp>
#include <eon/image.hpp>
#include <eon/learning.hpp>
#include <eon/network.hpp>
#include <eon/rng.hpp>

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace eon;

ModelConfig model(std::size_t neurons) {
  ModelConfig m;
  m.neurons = neurons;
  m.clusters = 0;
  return m;
}

CompressedVector spikes(const ModelConfig& m, Rng& rng) {
  CompressedVector s(m.side, m.filters);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (rng.uniform(4) != 0) {
      s.set(i, static_cast<std::uint8_t>(1 + rng.uniform(m.filters)));
    }
  }
  return s;
}

void BM_MatchCount(benchmark::State& state) {
  const ModelConfig m = model(1);
  Rng rng(1);
  const auto w = random_weights(m.side, m.filters, m.active, rng);
  const auto s = spikes(m, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_count(s, w));
  }
}
BENCHMARK(BM_MatchCount);

void BM_Infer(benchmark::State& state) {
  const ModelConfig m = model(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  const Layer layer(m, rng);
  const auto s = expand(spikes(m, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(infer(layer, s, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Infer)->Arg(400)->Arg(2000)->Arg(9000);

void BM_Encode(benchmark::State& state) {
  const auto bank = FilterBank::oriented_edges(8, 5);
  Rng rng(3);
  Image img(14, 14);
  for (auto& p : img.pixels) {
    p = static_cast<std::uint8_t>(rng.uniform(256));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(img, bank));
  }
}
BENCHMARK(BM_Encode);

void BM_LearnStep(benchmark::State& state) {
  const ModelConfig m = model(2000);
  Rng rng(4);
  const Layer fresh(m, rng);
  std::vector<CompressedVector> inputs;
  for (int i = 0; i < 256; ++i) {
    inputs.push_back(spikes(m, rng));
  }
  LearnConfig cfg;
  Layer layer = fresh;
  std::size_t i = 0;
  for (auto _ : state) {
    if (++i % 1000 == 0) {
      state.PauseTiming();
      layer = fresh;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(learn_step(layer, inputs[i % inputs.size()], std::nullopt, cfg, rng));
  }
}
BENCHMARK(BM_LearnStep);

} // namespace

BENCHMARK_MAIN();
