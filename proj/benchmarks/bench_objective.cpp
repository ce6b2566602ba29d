#include <benchmark/benchmark.h>

#include "garner/objective.hpp"
#include "garner/synthetic.hpp"
#include "garner/trainer.hpp"
#include "garner/views.hpp"

namespace {

using garner::Index;

struct LossFixture {
  garner::RoadDataset ds;
  garner::ViewSet views;
  garner::ModelParams params;
  std::vector<garner::Index> shuffle;
  garner::ObjectiveConfig ocfg;

  explicit LossFixture(Index n, Index p, Index f) {
    ds = garner::generate_synthetic(n, 4, 9).dataset;
    garner::TrainConfig cfg;
    cfg.p = p;
    cfg.f = f;
    views = garner::build_views(ds, cfg);
    params = garner::ModelParams::init(ds.C.cols(), ds.X.cols(), p, f, 1);
    shuffle = garner::random_row_permutation(n, 2);
  }
};

void BM_LossAndGradients(benchmark::State& state) {
  LossFixture fx(state.range(0), 32, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::loss_and_gradients(
        fx.views, fx.ds.C, fx.ds.X, fx.params, fx.shuffle, fx.ocfg));
  }
}
BENCHMARK(BM_LossAndGradients)->Arg(500)->Arg(1000);

void BM_LossOnly(benchmark::State& state) {
  LossFixture fx(state.range(0), 32, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(garner::loss_only(fx.views, fx.ds.C, fx.ds.X,
                                               fx.params, fx.shuffle,
                                               fx.ocfg));
  }
}
BENCHMARK(BM_LossOnly)->Arg(500)->Arg(1000);

}  // namespace
