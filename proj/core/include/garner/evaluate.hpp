#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "garner/dataset.hpp"
#include "garner/dense.hpp"
#include "garner/encoder.hpp"

namespace garner {

// One probe run on frozen embeddings. Metrics whose value is undefined
// for the data at hand (e.g. AUROC with a single test class) are simply
// absent from the map.
struct EvalReport {
  Task task = Task::kFunction;
  std::map<std::string, Real> metrics;
  std::uint64_t split_seed = 0;
  Real train_fraction = 0.7;
  Real val_fraction = 0.1;
  Real test_fraction = 0.2;
};

struct MetricStats {
  Real mean = 0.0;
  Real stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct AggregateReport {
  Task task = Task::kFunction;
  std::map<std::string, MetricStats> metrics;
  int runs = 0;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
};

// Disjoint 70/10/20 shuffle split of [0, n).
Split make_split(Index n, std::uint64_t seed);

// Same, redrawn (up to 100 tries) until every class that occurs at all
// occurs in both the train and the test part.
Split make_classification_split(std::span<const int> classes,
                                std::uint64_t seed);

// Multinomial logistic probe with an L2 penalty on the weights (never
// the intercept), fitted by gradient descent with backtracking on
// standardized features.
struct LogisticProbe {
  DenseMatrix w;       // dim x classes
  Vector b;            // classes
  Vector feat_mean;    // standardization learned on the training rows
  Vector feat_scale;
};

LogisticProbe fit_logistic_probe(const DenseMatrix& z,
                                 std::span<const int> labels, int num_classes,
                                 Real lambda = 1e-4, Real tol = 1e-6,
                                 int max_iters = 500);
// Row-stochastic class probabilities.
DenseMatrix logistic_probabilities(const LogisticProbe& probe,
                                   const DenseMatrix& z);
std::vector<int> logistic_predict(const LogisticProbe& probe,
                                  const DenseMatrix& z);

// Ridge regression in closed form with a centered, unpenalized
// intercept. A non-finite solve is retried once at 10x lambda.
struct RidgeModel {
  Vector w;
  Real b = 0.0;
};

RidgeModel fit_ridge(const DenseMatrix& z, std::span<const Real> y,
                     Real lambda = 1e-2);
Vector ridge_predict(const RidgeModel& model, const DenseMatrix& z);

// Classification metrics. micro_f1 aggregates TP/FP/FN globally, which
// for single-label prediction equals accuracy; macro_f1 averages
// per-class F1 over the classes present in the truth.
Real micro_f1(std::span<const int> pred, std::span<const int> truth);
Real macro_f1(std::span<const int> pred, std::span<const int> truth,
              int num_classes);
// One-vs-rest AUROC by tie-corrected rank sums, averaged over classes
// with both positives and negatives in `truth`. Returns false when no
// class qualifies.
bool macro_auroc_ovr(const DenseMatrix& scores, std::span<const int> truth,
                     Real& out);

// Regression metrics. MAPE skips targets with |y| < 1e-6 and is
// reported as a fraction, not a percentage.
Real mean_absolute_error(std::span<const Real> pred, std::span<const Real> y);
Real root_mean_squared_error(std::span<const Real> pred,
                             std::span<const Real> y);
Real mean_absolute_percentage_error(std::span<const Real> pred,
                                    std::span<const Real> y);

// Retrieval ranks: 1-based rank of each query's true node under
// descending score, ties resolved toward the lower node id.
std::vector<Index> retrieval_ranks(const DenseMatrix& scores,
                                   std::span<const Index> truth);
Real recall_at_k(std::span<const Index> ranks, Index k);
Real mean_reciprocal_rank(std::span<const Index> ranks);

// Queries enter embedding space through the trained configuration
// projection with a zero basic-feature block and no propagation, then
// cosine-score against every road embedding.
DenseMatrix map_queries(const DenseMatrix& queries, const ModelParams& params);
DenseMatrix cosine_scores(const DenseMatrix& query_emb,
                          const EmbeddingMatrix& z);

EvalReport eval_function(const EmbeddingMatrix& z, const LabelSet& labels,
                         std::uint64_t seed);
EvalReport eval_traffic(const EmbeddingMatrix& z, const LabelSet& labels,
                        std::uint64_t seed);
// Deterministic; no split is involved.
EvalReport eval_retrieval(const EmbeddingMatrix& z, const LabelSet& queries,
                          const ModelParams& params);

// Runs the task once per seed in [seed, seed + runs) and reports
// mean and sample standard deviation per metric. `params` is required
// for retrieval and ignored otherwise.
AggregateReport evaluate_repeated(const EmbeddingMatrix& z,
                                  const LabelSet& labels,
                                  const ModelParams* params,
                                  std::uint64_t seed, int runs);

}  // namespace garner
