#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tgaicc/consensus.hpp"
#include "tgaicc/featurize.hpp"
#include "tgaicc/kmeans.hpp"
#include "tgaicc/metrics.hpp"
#include "tgaicc/rng.hpp"

namespace {

using namespace tgaicc;

Labeling random_labeling(Rng& rng, std::size_t n, int k) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : static_cast<int>(rng.below(k));
  return Labeling(labels);
}

void BM_Ami(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const auto a = random_labeling(rng, n, k);
  const auto b = random_labeling(rng, n, k);
  for (auto _ : state) benchmark::DoNotOptimize(ami(a, b).value);
}
BENCHMARK(BM_Ami)->Args({1000, 10})->Args({10000, 13})->Args({10000, 50})->Unit(benchmark::kMicrosecond);

void BM_Ari(benchmark::State& state) {
  Rng rng(2);
  const auto a = random_labeling(rng, 10000, 50);
  const auto b = random_labeling(rng, 10000, 50);
  for (auto _ : state) benchmark::DoNotOptimize(ari(a, b).value);
}
BENCHMARK(BM_Ari)->Unit(benchmark::kMicrosecond);

void BM_KMeans(benchmark::State& state) {
  Rng rng(3);
  Matrix x(static_cast<std::size_t>(state.range(0)), 64);
  for (auto& v : x.data()) v = rng.normal();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(x, static_cast<int>(state.range(1)), seed++).inertia);
}
BENCHMARK(BM_KMeans)->Args({416, 13})->Args({2000, 10})->Unit(benchmark::kMillisecond);

void BM_Tfidf(benchmark::State& state) {
  Rng rng(4);
  const std::vector<std::string> words{"the", "rank", "of", "card", "shown", "is", "ace", "king", "queen",
                                       "jack", "suit", "heart", "club", "spade", "diamond", "picture"};
  std::vector<std::string> docs(static_cast<std::size_t>(state.range(0)));
  for (auto& d : docs) {
    for (int w = 0; w < 12; ++w) d += words[rng.below(words.size())] + " ";
  }
  for (auto _ : state) benchmark::DoNotOptimize(tfidf(docs).data.rows());
}
BENCHMARK(BM_Tfidf)->Arg(416)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Consensus(benchmark::State& state) {
  Rng rng(5);
  const auto method = static_cast<ConsensusMethod>(state.range(0));
  std::vector<Labeling> members;
  for (int m = 0; m < 12; ++m) members.push_back(random_labeling(rng, 416, 4));
  const auto e = Ensemble::of(members);
  for (auto _ : state) benchmark::DoNotOptimize(run_consensus(method, e, 4, 0).k());
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Consensus)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
