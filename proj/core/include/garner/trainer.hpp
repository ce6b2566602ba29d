#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "garner/dataset.hpp"
#include "garner/dense.hpp"
#include "garner/encoder.hpp"
#include "garner/objective.hpp"
#include "garner/views.hpp"

namespace garner {

struct TrainConfig {
  Index k = 6;      // neighbours per node in the configuration kNN view
  Index d = 22;     // negative-graph degree
  Real alpha = 0.2; // diffusion teleport probability
  Index p = 256;    // projection width per input block
  Index f = 512;    // embedding width
  int depth = 2;    // propagation steps in the encoder
  Real lr = 0.001;
  int iters = 2500;
  Index batch = 4000;  // nodes per step; clamped to n
  int patience = 50;   // steps without a new best loss before stopping
  std::uint64_t seed = 0;

  int diffusion_terms = 64;
  Index diffusion_topk = 64;
  // Ablation switches. Disabling the config view drops the kNN graph and
  // zeroes the configuration inputs; disabling the spectral negative
  // falls back to feature shuffling for the config-view corruption.
  bool use_config_view = true;
  bool use_spectral_negative = true;
  bool l2_spectral_negative = false;

  int certify_every = 100;   // eigencheck cadence on fresh negatives; 0 = never
  int checkpoint_every = 500;           // 0 disables periodic snapshots
  std::filesystem::path checkpoint_path;  // empty: best iterate in memory only
  int log_every = 0;                    // stderr progress cadence; 0 = silent

  void validate() const;
};

struct IterationLog {
  int iter = 0;
  Real l1 = 0.0;
  Real l2 = 0.0;
  Real total = 0.0;
};

struct TrainResult {
  ModelParams params;  // best-loss iterate, not the last one
  std::vector<IterationLog> log;
  Real best_loss = 0.0;
  int best_iter = -1;
  int iterations_run = 0;
};

// Full-graph views: topology as given, configuration kNN (edgeless when
// the config view is off), truncated-PPR diffusion, and a d-regular
// negative. The degree is clamped to n-1 and parity-adjusted so the
// graph stays realizable.
ViewSet build_views(const RoadDataset& ds, const TrainConfig& cfg);

// Largest realizable regular degree: min(d, n-1), decremented once if
// the stub count n*d would be odd.
Index clamp_regular_degree(Index d, Index n);

struct BatchViews {
  ViewSet views;
  std::vector<Index> node_ids;  // ascending; batch row i is node_ids[i]
};

// One uniform node sample applied identically to g0/g1/g2: an edge
// survives iff both endpoints are sampled, ids reindexed densely. The
// negative graph is not induced (that would break regularity); a fresh
// one is drawn at the batch size with the source graph's degree.
BatchViews subsample_views(const ViewSet& views, Index batch,
                           std::uint64_t seed, bool certify_negative = false);

// Adaptive-moment gradient descent on the combined contrastive loss over
// subsampled batches, early-stopped on the best observed batch loss.
// Deterministic given cfg.seed.
TrainResult train(const RoadDataset& ds, const TrainConfig& cfg);

// Full-graph forward on every active view, fused by elementwise mean.
EmbeddingMatrix embed(const RoadDataset& ds, const ModelParams& params,
                      const TrainConfig& cfg);

// CSV with header iter,l1,l2,total.
void save_training_log(const std::filesystem::path& path,
                       const std::vector<IterationLog>& log);

}  // namespace garner
