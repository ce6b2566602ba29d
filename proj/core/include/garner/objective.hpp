#pragma once

#include <span>

#include "garner/dense.hpp"
#include "garner/encoder.hpp"
#include "garner/views.hpp"

namespace garner {

// log(1 + exp(x)) without overflow for large |x|.
Real stable_softplus(Real x);
// Logistic function, evaluated on the non-overflowing branch.
Real stable_sigmoid(Real x);

// Raw bilinear score a^T W b.
Real disc_score(const Vector& a, const Vector& b, const DenseMatrix& w);
// sigma(a^T W b) in (0, 1).
Real discriminate(const Vector& a, const Vector& b, const DenseMatrix& w);

// Jensen-Shannon mutual-information estimate between node embeddings
// and a graph summary:
//   mean_i log D(z_pos_i, z_g) + mean_i log(1 - D(z_neg_i, z_g)),
// always <= 0, approaching 0 as the discriminator separates perfectly.
// Evaluated through softplus so extreme scores stay finite.
Real jsd_mi(const EmbeddingMatrix& z_pos, const Vector& z_g,
            const EmbeddingMatrix& z_neg, const DenseMatrix& w);

// L1 = -[ jsd_mi(Z0, pool(Z1), Z0_shuf, W1) + jsd_mi(Z1, pool(Z0), Z1_neg, W1) ]
Real loss_l1(const EmbeddingMatrix& z0, const EmbeddingMatrix& z1,
             const EmbeddingMatrix& z0_shuf_neg,
             const EmbeddingMatrix& z1_spec_neg, const DenseMatrix& w1);

// L2: same shape over the diffusion view, negatives shuffled on both
// sides.
Real loss_l2(const EmbeddingMatrix& z0, const EmbeddingMatrix& z2,
             const EmbeddingMatrix& z0_shuf_neg,
             const EmbeddingMatrix& z2_shuf_neg, const DenseMatrix& w2);

struct LossBreakdown {
  Real l1 = 0.0;
  Real l2 = 0.0;
  Real total = 0.0;
  // The four mutual-information terms: (view, summary) pairings
  // (0,1), (1,0), (0,2), (2,0).
  Real mi01 = 0.0;
  Real mi10 = 0.0;
  Real mi02 = 0.0;
  Real mi20 = 0.0;
};

struct ParamGradients {
  DenseMatrix w_c, w_x, theta0, theta1, theta2, w_disc1, w_disc2;
  static ParamGradients zeros_like(const ModelParams& params);
};

struct ObjectiveConfig {
  int propagation_depth = 2;  // K
  // Include the configuration kNN view and L1. Off = topology-only
  // training on L2.
  bool use_config_view = true;
  // L1's view-1 negative: propagate over the regular negative graph
  // (on) or fall back to feature shuffling (off).
  bool use_spectral_negative = true;
  // Optional: use the spectral negative for L2's corruptions too.
  bool l2_spectral_negative = false;
};

// Loss and analytic gradients of L = L1 + L2 at `params`, for one
// (possibly subsampled) batch. `shuffle` is the row permutation that
// builds the corrupted inputs; it is passed in, not drawn here, so the
// loss is a deterministic function of the parameters.
std::pair<LossBreakdown, ParamGradients> loss_and_gradients(
    const ViewSet& views, const DenseMatrix& c, const DenseMatrix& x,
    const ModelParams& params, std::span<const Index> shuffle,
    const ObjectiveConfig& cfg);

// Forward-only evaluation with identical semantics.
LossBreakdown loss_only(const ViewSet& views, const DenseMatrix& c,
                        const DenseMatrix& x, const ModelParams& params,
                        std::span<const Index> shuffle,
                        const ObjectiveConfig& cfg);

}  // namespace garner
