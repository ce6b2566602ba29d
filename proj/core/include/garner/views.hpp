#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "garner/dense.hpp"
#include "garner/sparse_graph.hpp"

namespace garner {

// The graphs contrasted during training. All four share the node count:
//   g0    road topology
//   g1    configuration-similarity kNN graph (binary weights)
//   g2    diffusion graph (personalized-PageRank weights)
//   gneg  exactly d-regular negative graph
struct ViewSet {
  SparseGraph g0;
  SparseGraph g1;
  SparseGraph g2;
  SparseGraph gneg;

  Index num_nodes() const { return g0.num_nodes(); }
  void validate() const;
};

// Norm-based similarity 1 / (1 + ||ci - cj||); 1 iff the vectors match.
Real config_similarity(std::span<const Real> ci, std::span<const Real> cj);

// Connect each node to its k most similar rows of C (self excluded,
// distance ties broken toward the lower id), then symmetrize by union.
// Binary weights; out-degree before symmetrization is exactly k.
SparseGraph knn_similarity_graph(const DenseMatrix& c, Index k);

// Truncated-series personalized PageRank
//   P ~ alpha * sum_{t=0}^{terms} ((1-alpha) M)^t,
//   M = D~^{-1/2} A D~^{-1/2},  D~ = rowsum(A + I),
// followed by keeping the topk largest entries per row (value ties
// toward the lower column) and re-symmetrizing with max(P_ij, P_ji).
SparseGraph ppr_diffusion(const SparseGraph& g, Real alpha, int terms,
                          Index topk);

// P before sparsification, as a dense matrix. Exposed for fidelity
// checks against the closed-form inverse; memory is O(n^2).
DenseMatrix ppr_dense(const SparseGraph& g, Real alpha, int terms);

struct RegularGraphOptions {
  int max_attempts = 20;
  // Certification solves a dense eigenproblem; skipped above this size
  // or when disabled.
  bool certify = true;
  Index certify_max_nodes = 2000;
};

// Uniform-ish random d-regular simple graph by stub pairing with
// rejection. Each attempt draws a fresh seed-derived stream; attempts
// whose spectrum leaves [d - 2*sqrt(d-1), d + 2*sqrt(d-1)] on the
// nonzero eigenvalues are resampled.
SparseGraph regular_negative_graph(Index n, Index d, std::uint64_t seed,
                                   const RegularGraphOptions& opts = {});

// Uniform random non-identity permutation of [0, n).
std::vector<Index> random_row_permutation(Index n, std::uint64_t seed);

// Rows of h reordered by random_row_permutation(h.rows(), seed).
DenseMatrix shuffle_rows(const DenseMatrix& h, std::uint64_t seed);

}  // namespace garner
