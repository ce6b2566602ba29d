#include <benchmark/benchmark.h>

#include <random>

#include "garner/synthetic.hpp"
#include "garner/views.hpp"

namespace {

using garner::Index;
using garner::Real;

garner::RoadDataset synthetic_dataset(Index n) {
  return garner::generate_synthetic(n, 4, 3).dataset;
}

void BM_KnnSimilarityGraph(benchmark::State& state) {
  const Index n = state.range(0);
  const auto ds = synthetic_dataset(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::knn_similarity_graph(ds.C, 6));
  }
}
BENCHMARK(BM_KnnSimilarityGraph)->Arg(500)->Arg(2000);

void BM_PprDiffusion(benchmark::State& state) {
  const Index n = state.range(0);
  const auto ds = synthetic_dataset(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::ppr_diffusion(ds.graph, 0.2, 64, 64));
  }
}
BENCHMARK(BM_PprDiffusion)->Arg(500)->Arg(2000);

void BM_RegularNegativeUncertified(benchmark::State& state) {
  const Index n = state.range(0);
  garner::RegularGraphOptions opts;
  opts.certify = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        garner::regular_negative_graph(n, 22, seed++, opts));
  }
}
BENCHMARK(BM_RegularNegativeUncertified)->Arg(500)->Arg(2000);

void BM_RegularNegativeCertified(benchmark::State& state) {
  const Index n = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::regular_negative_graph(n, 22, seed++));
  }
}
BENCHMARK(BM_RegularNegativeCertified)->Arg(500);

}  // namespace
