#include "garner/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "garner/graph_ops.hpp"
#include "garner/rng.hpp"

namespace garner {

void TrainConfig::validate() const {
  if (k < 1) throw InvalidArgument("kNN degree must be at least 1");
  if (d < 1) throw InvalidArgument("negative-graph degree must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("teleport probability must lie in (0, 1)");
  }
  if (p < 1 || f < 1) throw InvalidArgument("widths must be positive");
  if (depth < 1) throw InvalidArgument("propagation depth must be positive");
  if (!(lr > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (iters < 0) throw InvalidArgument("iteration count must be non-negative");
  if (batch < 1) throw InvalidArgument("batch size must be positive");
  if (patience < 1) throw InvalidArgument("patience must be positive");
  if (diffusion_terms < 1) {
    throw InvalidArgument("diffusion series needs at least one term");
  }
  if (diffusion_topk < 1) {
    throw InvalidArgument("diffusion row budget must be positive");
  }
  if (certify_every < 0 || checkpoint_every < 0 || log_every < 0) {
    throw InvalidArgument("cadence values must be non-negative");
  }
}

Index clamp_regular_degree(Index d, Index n) {
  Index d_eff = std::min(d, n - 1);
  if (d_eff < 0) d_eff = 0;
  if (d_eff > 0 && (d_eff % 2) != 0 && (n % 2) != 0) --d_eff;
  return d_eff;
}

ViewSet build_views(const RoadDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  ds.validate();
  const Index n = ds.n();
  ViewSet views;
  views.g0 = ds.graph;
  if (cfg.use_config_view) {
    DenseMatrix c = ds.C;
    fill_missing_configs(c, ds.has_config);
    views.g1 = knn_similarity_graph(c, std::min(cfg.k, n - 1));
  } else {
    views.g1 = SparseGraph::from_edges(n, {}, true);
  }
  views.g2 = ppr_diffusion(ds.graph, cfg.alpha, cfg.diffusion_terms,
                           cfg.diffusion_topk);
  const Index d_eff = clamp_regular_degree(cfg.d, n);
  if (d_eff > 0) {
    views.gneg = regular_negative_graph(n, d_eff, cfg.seed);
  } else {
    views.gneg = SparseGraph::from_edges(n, {}, true);
  }
  views.validate();
  return views;
}

BatchViews subsample_views(const ViewSet& views, Index batch,
                           std::uint64_t seed, bool certify_negative) {
  views.validate();
  if (batch < 1) throw InvalidArgument("batch size must be positive");
  const Index n = views.num_nodes();
  const Index m = std::min(batch, n);

  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::mt19937_64 rng = make_rng(seed, streams::kSubsample, 0);
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(pick(rng))]);
  }
  BatchViews out;
  out.node_ids.assign(pool.begin(), pool.begin() + m);
  std::sort(out.node_ids.begin(), out.node_ids.end());

  out.views.g0 = views.g0.induced_subgraph(out.node_ids);
  out.views.g1 = views.g1.induced_subgraph(out.node_ids);
  out.views.g2 = views.g2.induced_subgraph(out.node_ids);

  Index source_d = 0;
  for (Index i = 0; i < n; ++i) {
    source_d = std::max(source_d,
                        static_cast<Index>(views.gneg.neighbors(i).size()));
  }
  const Index d_eff = clamp_regular_degree(source_d, m);
  if (d_eff > 0) {
    RegularGraphOptions opts;
    opts.certify = certify_negative;
    opts.certify_max_nodes = m;  // when asked, certify at any batch size
    out.views.gneg = regular_negative_graph(m, d_eff, seed, opts);
  } else {
    out.views.gneg = SparseGraph::from_edges(m, {}, true);
  }
  out.views.validate();
  return out;
}

namespace {

std::array<DenseMatrix*, 7> param_slots(ModelParams& p) {
  return {&p.w_c, &p.w_x, &p.theta0, &p.theta1, &p.theta2, &p.w_disc1,
          &p.w_disc2};
}

std::array<const DenseMatrix*, 7> grad_slots(const ParamGradients& g) {
  return {&g.w_c, &g.w_x, &g.theta0, &g.theta1, &g.theta2, &g.w_disc1,
          &g.w_disc2};
}

struct AdamState {
  static constexpr Real kBeta1 = 0.9;
  static constexpr Real kBeta2 = 0.999;
  static constexpr Real kEps = 1e-8;

  std::array<DenseMatrix, 7> m;
  std::array<DenseMatrix, 7> v;
  int t = 0;

  explicit AdamState(ModelParams& params) {
    const auto slots = param_slots(params);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      m[i] = DenseMatrix::Zero(slots[i]->rows(), slots[i]->cols());
      v[i] = m[i];
    }
  }

  void step(ModelParams& params, const ParamGradients& grads, Real lr) {
    ++t;
    const Real c1 = 1.0 - std::pow(kBeta1, t);
    const Real c2 = 1.0 - std::pow(kBeta2, t);
    const auto ps = param_slots(params);
    const auto gs = grad_slots(grads);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const DenseMatrix& g = *gs[i];
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
      v[i].array() = kBeta2 * v[i].array() + (1.0 - kBeta2) * g.array().square();
      ps[i]->array() -=
          lr * (m[i].array() / c1) / ((v[i].array() / c2).sqrt() + kEps);
    }
  }
};

}  // namespace

TrainResult train(const RoadDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  ds.validate();
  const Index n = ds.n();
  if (std::min(cfg.batch, n) < 2) {
    throw InvalidArgument("training needs at least two sampled nodes");
  }

  DenseMatrix c_all;
  if (cfg.use_config_view) {
    c_all = ds.C;
    fill_missing_configs(c_all, ds.has_config);
  } else {
    c_all = DenseMatrix::Zero(n, ds.C.cols());
  }

  TrainResult result;
  result.params = ModelParams::init(ds.C.cols(), ds.X.cols(), cfg.p, cfg.f,
                                    cfg.seed);
  if (cfg.iters == 0) return result;

  const ViewSet full_views = build_views(ds, cfg);
  ObjectiveConfig ocfg;
  ocfg.propagation_depth = cfg.depth;
  ocfg.use_config_view = cfg.use_config_view;
  ocfg.use_spectral_negative = cfg.use_spectral_negative;
  ocfg.l2_spectral_negative = cfg.l2_spectral_negative;

  const bool wants_negative =
      (cfg.use_config_view && cfg.use_spectral_negative) ||
      cfg.l2_spectral_negative;
  if (wants_negative && cfg.certify_every > 1) {
    std::fprintf(stderr,
                 "note: negative graphs are eigenvalue-certified on the first "
                 "batch and every %d-th after; draws in between are "
                 "uncertified\n",
                 cfg.certify_every);
  }

  ModelParams params = result.params;
  ModelParams best = params;
  AdamState adam(params);
  Real best_loss = std::numeric_limits<Real>::infinity();
  int best_iter = -1;
  int since_best = 0;
  int ran = 0;

  for (int iter = 0; iter < cfg.iters; ++iter) {
    const bool certify = wants_negative && cfg.certify_every > 0 &&
                         (iter % cfg.certify_every) == 0;
    const std::uint64_t batch_seed =
        derive_seed(cfg.seed, streams::kSubsample,
                    static_cast<std::uint64_t>(iter));
    BatchViews bv = subsample_views(full_views, cfg.batch, batch_seed, certify);
    const Index bn = static_cast<Index>(bv.node_ids.size());

    const DenseMatrix c_b = gather_rows(c_all, bv.node_ids);
    const DenseMatrix x_b = gather_rows(ds.X, bv.node_ids);
    const std::vector<Index> shuffle = random_row_permutation(
        bn, derive_seed(cfg.seed, streams::kShuffle,
                        static_cast<std::uint64_t>(iter)));

    auto [loss, grads] =
        loss_and_gradients(bv.views, c_b, x_b, params, shuffle, ocfg);
    result.log.push_back({iter, loss.l1, loss.l2, loss.total});
    ++ran;

    if (cfg.log_every > 0 && (iter % cfg.log_every) == 0) {
      std::fprintf(stderr, "iter %6d  loss %.6f  (l1 %.6f  l2 %.6f)\n", iter,
                   loss.total, loss.l1, loss.l2);
    }

    if (loss.total < best_loss) {
      best_loss = loss.total;
      best_iter = iter;
      best = params;  // iterate that produced this loss, before the update
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }

    adam.step(params, grads, cfg.lr);

    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        ((iter + 1) % cfg.checkpoint_every) == 0) {
      save_checkpoint(cfg.checkpoint_path, params);
    }
  }

  result.params = std::move(best);
  result.best_loss = best_loss;
  result.best_iter = best_iter;
  result.iterations_run = ran;
  return result;
}

EmbeddingMatrix embed(const RoadDataset& ds, const ModelParams& params,
                      const TrainConfig& cfg) {
  cfg.validate();
  ds.validate();
  params.validate();
  const Index n = ds.n();
  if (params.w_c.rows() != ds.C.cols() || params.w_x.rows() != ds.X.cols()) {
    throw DimensionError("parameter shapes do not match the dataset inputs");
  }

  DenseMatrix c_all;
  if (cfg.use_config_view) {
    c_all = ds.C;
    fill_missing_configs(c_all, ds.has_config);
  } else {
    c_all = DenseMatrix::Zero(n, ds.C.cols());
  }
  const DenseMatrix h = project_inputs(c_all, ds.X, params.w_c, params.w_x);

  const SparseGraph s0 = normalize_adjacency(ds.graph);
  EmbeddingMatrix sum = sgc_forward(s0, h, params.theta0, cfg.depth);
  Real active = 1.0;

  const SparseGraph g2 = ppr_diffusion(ds.graph, cfg.alpha, cfg.diffusion_terms,
                                       cfg.diffusion_topk);
  sum += sgc_forward(normalize_adjacency(g2), h, params.theta2, cfg.depth);
  active += 1.0;

  if (cfg.use_config_view) {
    const SparseGraph g1 =
        knn_similarity_graph(c_all, std::min(cfg.k, n - 1));
    sum += sgc_forward(normalize_adjacency(g1), h, params.theta1, cfg.depth);
    active += 1.0;
  }
  return sum / active;
}

void save_training_log(const std::filesystem::path& path,
                       const std::vector<IterationLog>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "iter,l1,l2,total\n";
  char buf[160];
  for (const IterationLog& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.iter, row.l1,
                  row.l2, row.total);
    out << buf;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace garner
