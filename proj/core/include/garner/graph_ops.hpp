#pragma once

#include "garner/dense.hpp"
#include "garner/sparse_graph.hpp"

namespace garner {

// Symmetric normalization with implicit self-loops:
//   S_hat = D~^{-1/2} (S + I) D~^{-1/2},  D~ = rowsum(S + I).
// Requires a symmetric input; the result is exactly symmetric.
SparseGraph normalize_adjacency(const SparseGraph& g);

// Symmetric normalization without adding self-loops:
//   D~^{-1/2} A D~^{-1/2},  D~ = rowsum(A + I).
// The +I in the scaling keeps isolated rows well defined while the
// numerator stays the bare adjacency.
SparseGraph normalize_no_self_loops(const SparseGraph& g);

// Plain symmetric normalization D^{-1/2} A D^{-1/2} with D = rowsum(A)
// and no implicit self-loop anywhere. Rows of an exactly d-regular
// graph come out as A/d, a doubly stochastic averaging operator; this
// is the convention for the negative-sample graph. Zero-degree rows
// stay zero.
SparseGraph normalize_plain(const SparseGraph& g);

// Combinatorial Laplacian L = D - A with D = diag(rowsum(A)).
// Self-loops cancel out of the diagonal; exact zeros are dropped.
SparseGraph laplacian(const SparseGraph& g);

// (1/2) * sum_ij w_ij ||z_i - z_j||^2 over stored entries; equals
// tr(Z^T L Z) for symmetric graphs.
Real dirichlet_energy(const DenseMatrix& z, const SparseGraph& g);

// Sparse-dense product g * x. Each output row accumulates neighbor rows
// in ascending column order, so results are reproducible bit for bit.
DenseMatrix spmm(const SparseGraph& g, const DenseMatrix& x);

// g^k * x via repeated spmm; k = 0 returns a copy of x.
DenseMatrix spmm_power(const SparseGraph& g, const DenseMatrix& x, int k);

}  // namespace garner
