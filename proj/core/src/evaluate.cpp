#include "garner/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "garner/rng.hpp"

namespace garner {

Split make_split(Index n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("a split needs at least 2 rows");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng = make_rng(seed, streams::kSplit, 0);
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(pick(rng))]);
  }
  const Index n_train = (7 * n) / 10;
  const Index n_val = n / 10;
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

namespace {

bool covers_all_classes(std::span<const int> classes,
                        const std::vector<Index>& part,
                        const std::vector<bool>& occurs) {
  std::vector<bool> seen(occurs.size(), false);
  for (Index i : part) seen[static_cast<std::size_t>(classes[i])] = true;
  for (std::size_t c = 0; c < occurs.size(); ++c) {
    if (occurs[c] && !seen[c]) return false;
  }
  return true;
}

}  // namespace

Split make_classification_split(std::span<const int> classes,
                                std::uint64_t seed) {
  const Index n = static_cast<Index>(classes.size());
  if (n < 2) throw InvalidArgument("a split needs at least 2 rows");
  int max_class = 0;
  for (int c : classes) {
    if (c < 0) throw InvalidArgument("negative class id");
    max_class = std::max(max_class, c);
  }
  std::vector<bool> occurs(static_cast<std::size_t>(max_class) + 1, false);
  for (int c : classes) occurs[static_cast<std::size_t>(c)] = true;

  for (int attempt = 0; attempt < 100; ++attempt) {
    Split s = make_split(n, derive_seed(seed, streams::kSplit,
                                        static_cast<std::uint64_t>(attempt)));
    if (covers_all_classes(classes, s.train, occurs) &&
        covers_all_classes(classes, s.test, occurs)) {
      return s;
    }
  }
  throw StructureError(
      "no split covered every class in both train and test; a class is too "
      "rare for the 70/20 protocol");
}

namespace {

void standardize_in_place(DenseMatrix& z, const Vector& mean,
                          const Vector& scale) {
  z.rowwise() -= mean.transpose();
  z.array().rowwise() /= scale.transpose().array();
}

Real logistic_objective(const DenseMatrix& z, std::span<const int> y,
                        const DenseMatrix& w, const Vector& b, Real lambda,
                        DenseMatrix& logits) {
  const Index m = z.rows();
  logits.noalias() = z * w;
  logits.rowwise() += b.transpose();
  Real nll = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Real row_max = logits.row(i).maxCoeff();
    Real denom = 0.0;
    for (Index c = 0; c < logits.cols(); ++c) {
      denom += std::exp(logits(i, c) - row_max);
    }
    nll -= logits(i, y[static_cast<std::size_t>(i)]) - row_max -
           std::log(denom);
  }
  return nll / static_cast<Real>(m) + 0.5 * lambda * w.squaredNorm();
}

void softmax_rows(DenseMatrix& logits) {
  for (Index i = 0; i < logits.rows(); ++i) {
    const Real row_max = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - row_max).exp();
    logits.row(i) /= logits.row(i).sum();
  }
}

}  // namespace

LogisticProbe fit_logistic_probe(const DenseMatrix& z,
                                 std::span<const int> labels, int num_classes,
                                 Real lambda, Real tol, int max_iters) {
  const Index m = z.rows();
  if (m == 0) throw DimensionError("empty training set");
  if (static_cast<Index>(labels.size()) != m) {
    throw DimensionError("label count does not match embedding rows");
  }
  if (num_classes < 1) throw InvalidArgument("need at least one class");
  for (int c : labels) {
    if (c < 0 || c >= num_classes) throw InvalidArgument("class id out of range");
  }

  LogisticProbe probe;
  probe.feat_mean = z.colwise().mean().transpose();
  Vector var = ((z.rowwise() - probe.feat_mean.transpose()).array().square())
                   .colwise()
                   .mean()
                   .transpose();
  probe.feat_scale = var.array().sqrt().max(1e-12);
  DenseMatrix zs = z;
  standardize_in_place(zs, probe.feat_mean, probe.feat_scale);

  const Index dim = z.cols();
  probe.w = DenseMatrix::Zero(dim, num_classes);
  probe.b = Vector::Zero(num_classes);

  DenseMatrix logits(m, num_classes);
  Real f = logistic_objective(zs, labels, probe.w, probe.b, lambda, logits);
  const Real inv_m = 1.0 / static_cast<Real>(m);

  for (int it = 0; it < max_iters; ++it) {
    DenseMatrix p = logits;
    softmax_rows(p);
    for (Index i = 0; i < m; ++i) {
      p(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    DenseMatrix gw = inv_m * (zs.transpose() * p) + lambda * probe.w;
    Vector gb = inv_m * p.colwise().sum().transpose();
    const Real gnorm2 = gw.squaredNorm() + gb.squaredNorm();
    if (std::sqrt(gnorm2) < tol) break;

    Real step = 1.0;
    DenseMatrix w_try;
    Vector b_try;
    Real f_try = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      w_try = probe.w - step * gw;
      b_try = probe.b - step * gb;
      f_try = logistic_objective(zs, labels, w_try, b_try, lambda, logits);
      if (f_try <= f - 0.5 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: gradient noise floor reached
    probe.w = std::move(w_try);
    probe.b = std::move(b_try);
    f = f_try;
  }
  return probe;
}

DenseMatrix logistic_probabilities(const LogisticProbe& probe,
                                   const DenseMatrix& z) {
  if (z.cols() != probe.w.rows()) {
    throw DimensionError("embedding width does not match the probe");
  }
  DenseMatrix zs = z;
  standardize_in_place(zs, probe.feat_mean, probe.feat_scale);
  DenseMatrix logits = zs * probe.w;
  logits.rowwise() += probe.b.transpose();
  softmax_rows(logits);
  return logits;
}

std::vector<int> logistic_predict(const LogisticProbe& probe,
                                  const DenseMatrix& z) {
  const DenseMatrix p = logistic_probabilities(probe, z);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Index i = 0; i < p.rows(); ++i) {
    Index arg = 0;
    p.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

RidgeModel fit_ridge(const DenseMatrix& z, std::span<const Real> y,
                     Real lambda) {
  const Index m = z.rows();
  if (m == 0) throw DimensionError("empty training set");
  if (static_cast<Index>(y.size()) != m) {
    throw DimensionError("target count does not match embedding rows");
  }
  if (lambda < 0.0) throw InvalidArgument("ridge penalty must be non-negative");

  const Vector mean = z.colwise().mean().transpose();
  Real y_mean = 0.0;
  for (Real v : y) y_mean += v;
  y_mean /= static_cast<Real>(m);

  const DenseMatrix zc = z.rowwise() - mean.transpose();
  Vector yc(m);
  for (Index i = 0; i < m; ++i) yc(i) = y[static_cast<std::size_t>(i)] - y_mean;

  const DenseMatrix gram = zc.transpose() * zc;
  const Vector rhs = zc.transpose() * yc;

  RidgeModel model;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Real lam = lambda * (attempt == 0 ? 1.0 : 10.0);
    DenseMatrix reg = gram;
    reg.diagonal().array() += lam;
    Eigen::LDLT<DenseMatrix> solver(reg);
    if (solver.info() == Eigen::Success) {
      model.w = solver.solve(rhs);
      if (model.w.allFinite()) {
        model.b = y_mean - mean.dot(model.w);
        return model;
      }
    }
  }
  throw StructureError("ridge system is degenerate even after inflating the "
                       "penalty tenfold");
}

Vector ridge_predict(const RidgeModel& model, const DenseMatrix& z) {
  if (z.cols() != model.w.size()) {
    throw DimensionError("embedding width does not match the model");
  }
  return (z * model.w).array() + model.b;
}

Real micro_f1(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw DimensionError("prediction and truth sizes differ or are empty");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == truth[i]) {
      ++tp;
    } else {
      ++fp;  // wrong prediction counts against the predicted class
      ++fn;  // and misses the true class
    }
  }
  return 2.0 * static_cast<Real>(tp) / static_cast<Real>(2 * tp + fp + fn);
}

Real macro_f1(std::span<const int> pred, std::span<const int> truth,
              int num_classes) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw DimensionError("prediction and truth sizes differ or are empty");
  }
  if (num_classes < 1) throw InvalidArgument("need at least one class");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0),
      fn(num_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i], t = truth[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes) {
      throw InvalidArgument("class id out of range");
    }
    if (p == t) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  Real sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (tp[c] + fn[c] == 0) continue;  // class absent from the truth
    ++present;
    const Real denom = static_cast<Real>(2 * tp[c] + fp[c] + fn[c]);
    sum += denom > 0.0 ? 2.0 * static_cast<Real>(tp[c]) / denom : 0.0;
  }
  if (present == 0) throw StructureError("no class present in the truth");
  return sum / static_cast<Real>(present);
}

bool macro_auroc_ovr(const DenseMatrix& scores, std::span<const int> truth,
                     Real& out) {
  const Index m = scores.rows();
  if (static_cast<Index>(truth.size()) != m || m == 0) {
    throw DimensionError("score rows do not match the truth");
  }
  Real sum = 0.0;
  int valid = 0;
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::vector<Real> ranks(static_cast<std::size_t>(m));
  for (Index c = 0; c < scores.cols(); ++c) {
    Index pos = 0;
    for (int t : truth) pos += (t == static_cast<int>(c)) ? 1 : 0;
    const Index neg = m - pos;
    if (pos == 0 || neg == 0) continue;

    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return scores(a, c) < scores(b, c);
    });
    // Average ranks across tied scores.
    Index i = 0;
    while (i < m) {
      Index j = i;
      while (j + 1 < m && scores(order[j + 1], c) == scores(order[i], c)) ++j;
      const Real avg = 0.5 * static_cast<Real>(i + j) + 1.0;
      for (Index t = i; t <= j; ++t) ranks[order[t]] = avg;
      i = j + 1;
    }
    Real rank_sum = 0.0;
    for (Index r = 0; r < m; ++r) {
      if (truth[static_cast<std::size_t>(r)] == static_cast<int>(c)) {
        rank_sum += ranks[static_cast<std::size_t>(r)];
      }
    }
    const Real p = static_cast<Real>(pos);
    sum += (rank_sum - p * (p + 1.0) / 2.0) /
           (p * static_cast<Real>(neg));
    ++valid;
  }
  if (valid == 0) return false;
  out = sum / static_cast<Real>(valid);
  return true;
}

namespace {

void check_pair(std::span<const Real> pred, std::span<const Real> y) {
  if (pred.size() != y.size() || pred.empty()) {
    throw DimensionError("prediction and target sizes differ or are empty");
  }
}

}  // namespace

Real mean_absolute_error(std::span<const Real> pred, std::span<const Real> y) {
  check_pair(pred, y);
  Real acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(pred[i] - y[i]);
  return acc / static_cast<Real>(y.size());
}

Real root_mean_squared_error(std::span<const Real> pred,
                             std::span<const Real> y) {
  check_pair(pred, y);
  Real acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Real d = pred[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<Real>(y.size()));
}

Real mean_absolute_percentage_error(std::span<const Real> pred,
                                    std::span<const Real> y) {
  check_pair(pred, y);
  Real acc = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) < 1e-6) continue;
    acc += std::abs(pred[i] - y[i]) / std::abs(y[i]);
    ++used;
  }
  if (used == 0) throw StructureError("every target is too close to zero");
  return acc / static_cast<Real>(used);
}

std::vector<Index> retrieval_ranks(const DenseMatrix& scores,
                                   std::span<const Index> truth) {
  const Index q = scores.rows();
  const Index n = scores.cols();
  if (static_cast<Index>(truth.size()) != q) {
    throw DimensionError("one truth node per query row required");
  }
  std::vector<Index> ranks(static_cast<std::size_t>(q));
  for (Index i = 0; i < q; ++i) {
    const Index t = truth[static_cast<std::size_t>(i)];
    if (t < 0 || t >= n) throw InvalidArgument("truth node id out of range");
    const Real st = scores(i, t);
    Index ahead = 0;
    for (Index j = 0; j < n; ++j) {
      const Real sj = scores(i, j);
      if (sj > st || (sj == st && j < t)) ++ahead;
    }
    ranks[static_cast<std::size_t>(i)] = ahead + 1;
  }
  return ranks;
}

Real recall_at_k(std::span<const Index> ranks, Index k) {
  if (ranks.empty()) throw DimensionError("no ranks");
  if (k < 1) throw InvalidArgument("cutoff must be positive");
  std::size_t hits = 0;
  for (Index r : ranks) hits += (r <= k) ? 1 : 0;
  return static_cast<Real>(hits) / static_cast<Real>(ranks.size());
}

Real mean_reciprocal_rank(std::span<const Index> ranks) {
  if (ranks.empty()) throw DimensionError("no ranks");
  Real acc = 0.0;
  for (Index r : ranks) acc += 1.0 / static_cast<Real>(r);
  return acc / static_cast<Real>(ranks.size());
}

DenseMatrix map_queries(const DenseMatrix& queries, const ModelParams& params) {
  if (queries.cols() != params.w_c.rows()) {
    throw DimensionError("query width does not match the configuration "
                         "projection");
  }
  // [q W_c | 0] Theta1 reduces to q W_c times the top block of Theta1.
  const Index p = params.p();
  return queries * params.w_c * params.theta1.topRows(p);
}

DenseMatrix cosine_scores(const DenseMatrix& query_emb,
                          const EmbeddingMatrix& z) {
  if (query_emb.cols() != z.cols()) {
    throw DimensionError("query and road embeddings differ in width");
  }
  DenseMatrix scores = query_emb * z.transpose();
  const Vector qn = query_emb.rowwise().norm();
  const Vector zn = z.rowwise().norm();
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index j = 0; j < scores.cols(); ++j) {
      const Real denom = qn(i) * zn(j);
      scores(i, j) = denom > 0.0 ? scores(i, j) / denom : 0.0;
    }
  }
  return scores;
}

EvalReport eval_function(const EmbeddingMatrix& z, const LabelSet& labels,
                         std::uint64_t seed) {
  if (labels.task != Task::kFunction) {
    throw InvalidArgument("label set is not a function task");
  }
  labels.validate(z.rows());
  const Split split = make_classification_split(labels.classes, seed);

  const DenseMatrix z_train = gather_rows(z, split.train);
  const DenseMatrix z_test = gather_rows(z, split.test);
  std::vector<int> y_train, y_test;
  y_train.reserve(split.train.size());
  y_test.reserve(split.test.size());
  for (Index i : split.train) {
    y_train.push_back(labels.classes[static_cast<std::size_t>(i)]);
  }
  for (Index i : split.test) {
    y_test.push_back(labels.classes[static_cast<std::size_t>(i)]);
  }

  const int num_classes = labels.num_classes();
  const LogisticProbe probe =
      fit_logistic_probe(z_train, y_train, num_classes);
  const std::vector<int> pred = logistic_predict(probe, z_test);
  const DenseMatrix prob = logistic_probabilities(probe, z_test);

  EvalReport report;
  report.task = Task::kFunction;
  report.split_seed = seed;
  report.metrics["micro_f1"] = micro_f1(pred, y_test);
  report.metrics["macro_f1"] = macro_f1(pred, y_test, num_classes);
  Real auroc = 0.0;
  if (macro_auroc_ovr(prob, y_test, auroc)) report.metrics["auroc"] = auroc;
  return report;
}

EvalReport eval_traffic(const EmbeddingMatrix& z, const LabelSet& labels,
                        std::uint64_t seed) {
  if (labels.task != Task::kTraffic) {
    throw InvalidArgument("label set is not a traffic task");
  }
  labels.validate(z.rows());
  const Split split = make_split(z.rows(), seed);

  const DenseMatrix z_train = gather_rows(z, split.train);
  const DenseMatrix z_test = gather_rows(z, split.test);
  std::vector<Real> y_train, y_test;
  for (Index i : split.train) {
    y_train.push_back(labels.speeds[static_cast<std::size_t>(i)]);
  }
  for (Index i : split.test) {
    y_test.push_back(labels.speeds[static_cast<std::size_t>(i)]);
  }

  const RidgeModel model = fit_ridge(z_train, y_train);
  const Vector pred_vec = ridge_predict(model, z_test);
  std::vector<Real> pred(pred_vec.data(), pred_vec.data() + pred_vec.size());

  EvalReport report;
  report.task = Task::kTraffic;
  report.split_seed = seed;
  report.metrics["mae"] = mean_absolute_error(pred, y_test);
  report.metrics["rmse"] = root_mean_squared_error(pred, y_test);
  report.metrics["mape"] = mean_absolute_percentage_error(pred, y_test);
  return report;
}

EvalReport eval_retrieval(const EmbeddingMatrix& z, const LabelSet& queries,
                          const ModelParams& params) {
  if (queries.task != Task::kRetrieval) {
    throw InvalidArgument("label set is not a retrieval task");
  }
  queries.validate(z.rows());
  const DenseMatrix query_emb = map_queries(queries.queries, params);
  const DenseMatrix scores = cosine_scores(query_emb, z);
  const std::vector<Index> ranks = retrieval_ranks(scores, queries.query_truth);

  EvalReport report;
  report.task = Task::kRetrieval;
  report.metrics["recall_at_10"] = recall_at_k(ranks, 10);
  report.metrics["mrr"] = mean_reciprocal_rank(ranks);
  return report;
}

AggregateReport evaluate_repeated(const EmbeddingMatrix& z,
                                  const LabelSet& labels,
                                  const ModelParams* params,
                                  std::uint64_t seed, int runs) {
  if (runs < 1) throw InvalidArgument("need at least one run");
  std::vector<EvalReport> reports;
  reports.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    switch (labels.task) {
      case Task::kFunction:
        reports.push_back(eval_function(z, labels, s));
        break;
      case Task::kTraffic:
        reports.push_back(eval_traffic(z, labels, s));
        break;
      case Task::kRetrieval:
        if (params == nullptr) {
          throw InvalidArgument("retrieval needs the trained parameters");
        }
        reports.push_back(eval_retrieval(z, labels, *params));
        break;
    }
  }

  AggregateReport agg;
  agg.task = labels.task;
  agg.runs = runs;
  for (const auto& [name, value] : reports.front().metrics) {
    bool everywhere = true;
    Real sum = 0.0;
    for (const EvalReport& rep : reports) {
      auto it = rep.metrics.find(name);
      if (it == rep.metrics.end()) {
        everywhere = false;
        break;
      }
      sum += it->second;
    }
    if (!everywhere) continue;
    const Real mean = sum / static_cast<Real>(runs);
    Real var = 0.0;
    for (const EvalReport& rep : reports) {
      const Real d = rep.metrics.at(name) - mean;
      var += d * d;
    }
    MetricStats stats;
    stats.mean = mean;
    stats.stddev = runs > 1 ? std::sqrt(var / static_cast<Real>(runs - 1)) : 0.0;
    agg.metrics[name] = stats;
  }
  return agg;
}

}  // namespace garner
