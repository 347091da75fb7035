// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "cafscore/cache.hpp"
#include "cafscore/fleur.hpp"
#include "cafscore/harness.hpp"
#include "cafscore/records.hpp"
#include "cafscore/stats.hpp"
#include "cafscore/windowing.hpp"

using namespace cafscore;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(eng);
  return v;
}

GenerationTrace sample_trace() {
  GenerationTrace t;
  t.model_id = "lalm";
  t.prompt_hash = "h";
  t.greedy_text = "0.85";
  auto step = [](const char* chosen) {
    TokenStep s{chosen, {}};
    for (int d = 0; d < 10; ++d) s.top_logprobs[std::to_string(d)] = -1.0 - d;
    s.top_logprobs["."] = -9.0;
    s.top_logprobs["</s>"] = -10.0;
    return s;
  };
  for (const char* tok : {"0", ".", "8", "5"}) t.token_steps.push_back(step(tok));
  t.token_steps[1].top_logprobs["."] = 0.0;
  return t;
}

void BM_FleurFromTrace(benchmark::State& state) {
  const auto trace = sample_trace();
  for (auto _ : state) benchmark::DoNotOptimize(fleur_score(extract_digit_distributions(trace)));
}
BENCHMARK(BM_FleurFromTrace);

void BM_KendallTau(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n, 1), y = random_values(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oNLogN);

void BM_SClapMax(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const EmbeddingRecord text{CaptionSubject{"c", ""}, "m", dim, random_values(dim, 3), Json::object()};
  std::vector<EmbeddingRecord> windows;
  for (int w = 0; w < 21; ++w)
    windows.push_back({AudioWindowSubject{"a", {double(w), 10.0}}, "m", dim, random_values(dim, 10 + w), Json::object()});
  for (auto _ : state) benchmark::DoNotOptimize(s_clap_score(text, windows, PoolingStrategy::max));
}
BENCHMARK(BM_SClapMax)->Arg(512)->Arg(1024);

void BM_PairwiseAccuracy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scores = random_values(2 * n, 4);
  std::vector<PreferenceItem> items(n);
  PairScoreMap map;
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = items[i];
    p.audio.id = "clip" + std::to_string(i);
    p.caption_a.id = "a";
    p.caption_b.id = "b";
    p.subset = i % 2 ? "Main" : "Hallucination";
    p.pair_type = kAllPairTypes[i % 3];
    map[p.key()] = {scores[2 * i], scores[2 * i + 1]};
  }
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_accuracy(items, map, TiePolicy::zero_credit));
}
BENCHMARK(BM_PairwiseAccuracy)->Arg(1000)->Arg(10000);

void BM_CacheKey(benchmark::State& state) {
  const Json payload{{"audio_id", "clip-000123"}, {"prompt", std::string(400, 'x')}, {"temperature", 0.0},
                     {"top_logprobs", 20}};
  for (auto _ : state) benchmark::DoNotOptimize(CacheKey::make("lalm", "generate", payload, "v1"));
}
BENCHMARK(BM_CacheKey);

void BM_TraceRoundtrip(benchmark::State& state) {
  const std::string line = encode_record_line(sample_trace());
  for (auto _ : state) benchmark::DoNotOptimize(encode_record_line(decode_record_line(line)));
}
BENCHMARK(BM_TraceRoundtrip);

}  // namespace

BENCHMARK_MAIN();
