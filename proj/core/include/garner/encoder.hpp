#pragma once

#include <cstdint>
#include <filesystem>

#include "garner/dense.hpp"
#include "garner/sparse_graph.hpp"

namespace garner {

using EmbeddingMatrix = DenseMatrix;

// Learnable state: input projections, one propagation weight per view,
// and one bilinear discriminator per loss.
struct ModelParams {
  DenseMatrix w_c;      // c x p
  DenseMatrix w_x;      // f' x p
  DenseMatrix theta0;   // 2p x f, topology view
  DenseMatrix theta1;   // 2p x f, configuration kNN view
  DenseMatrix theta2;   // 2p x f, diffusion view
  DenseMatrix w_disc1;  // f x f
  DenseMatrix w_disc2;  // f x f

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per matrix, each from its
  // own derived stream so shapes can change independently.
  static ModelParams init(Index c, Index f_in, Index p, Index f,
                          std::uint64_t seed);

  Index p() const { return w_c.cols(); }
  Index f() const { return theta0.cols(); }
  void validate() const;
};

// Z = s_hat^K H Theta. `s_hat` must already be normalized; K successive
// sparse products then one dense product.
EmbeddingMatrix sgc_forward(const SparseGraph& s_hat, const DenseMatrix& h,
                            const DenseMatrix& theta, int k);

// Z_bar = kneg_hat H Theta: one propagation over the normalized
// negative graph, sharing Theta with the positive encoder.
EmbeddingMatrix negative_sgc(const SparseGraph& kneg_hat, const DenseMatrix& h,
                             const DenseMatrix& theta);

// Column mean of Z; the graph-level summary vector.
Vector mean_pool(const EmbeddingMatrix& z);

// Checkpoint file: magic "GRNP", u32 matrix count, then per matrix a
// u32 name length, the name bytes, u32 rows, u32 cols, and the f32
// row-major payload, all little-endian.
void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace garner
