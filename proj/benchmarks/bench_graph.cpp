#include <benchmark/benchmark.h>

#include <random>

#include "garner/graph_ops.hpp"
#include "garner/sparse_graph.hpp"

namespace {

using garner::Index;
using garner::Real;

garner::SparseGraph random_graph(Index n, Index avg_degree,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> node(0, n - 1);
  std::vector<garner::Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(n * avg_degree / 2));
  for (Index t = 0; t < n * avg_degree / 2; ++t) {
    const Index i = node(rng);
    const Index j = node(rng);
    if (i == j) continue;
    pairs.push_back({i, j, 1.0});
  }
  // from_undirected rejects duplicate pairs; dedupe by set semantics.
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    const Index amin = std::min(a.src, a.dst), amax = std::max(a.src, a.dst);
    const Index bmin = std::min(b.src, b.dst), bmax = std::max(b.src, b.dst);
    return amin != bmin ? amin < bmin : amax < bmax;
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const auto& a, const auto& b) {
                            const Index amin = std::min(a.src, a.dst);
                            const Index amax = std::max(a.src, a.dst);
                            const Index bmin = std::min(b.src, b.dst);
                            const Index bmax = std::max(b.src, b.dst);
                            return amin == bmin && amax == bmax;
                          }),
              pairs.end());
  return garner::SparseGraph::from_undirected(n, pairs);
}

void BM_NormalizeAdjacency(benchmark::State& state) {
  const Index n = state.range(0);
  const auto g = random_graph(n, 8, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::normalize_adjacency(g));
  }
  state.SetItemsProcessed(state.iterations() * g.num_entries());
}
BENCHMARK(BM_NormalizeAdjacency)->Arg(1000)->Arg(4000);

void BM_SparseDenseProduct(benchmark::State& state) {
  const Index n = state.range(0);
  const auto s = garner::normalize_adjacency(random_graph(n, 8, 7));
  garner::DenseMatrix h(n, 64);
  std::mt19937_64 rng(11);
  std::normal_distribution<Real> gauss;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 64; ++j) h(i, j) = gauss(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::spmm(s, h));
  }
  state.SetItemsProcessed(state.iterations() * s.num_entries() * 64);
}
BENCHMARK(BM_SparseDenseProduct)->Arg(1000)->Arg(4000);

void BM_DirichletEnergy(benchmark::State& state) {
  const Index n = state.range(0);
  const auto g = random_graph(n, 8, 7);
  garner::DenseMatrix z(n, 64);
  std::mt19937_64 rng(13);
  std::normal_distribution<Real> gauss;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 64; ++j) z(i, j) = gauss(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::dirichlet_energy(z, g));
  }
}
BENCHMARK(BM_DirichletEnergy)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
