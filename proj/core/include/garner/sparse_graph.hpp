#pragma once

#include <span>
#include <vector>

#include "garner/types.hpp"

namespace garner {

// One directed entry of a sparse matrix / weighted graph.
struct Edge {
  Index src = 0;
  Index dst = 0;
  Real weight = 1.0;
};

// Compressed sparse row storage. Symmetric graphs store both directions
// explicitly; column indices are strictly ascending within each row.
//
// Adjacency builders enforce non-negative finite weights. Derived
// operators (e.g. a graph Laplacian) may carry negative entries and are
// constructed through from_csr, which checks structure only.
class SparseGraph {
 public:
  SparseGraph() = default;

  // Build from directed entries. Rejects out-of-range ids, duplicate
  // (src, dst) pairs, and non-finite or negative weights. When
  // `symmetric` is set, every (i, j) entry must have a (j, i) twin with
  // an identical weight.
  static SparseGraph from_edges(Index n, std::vector<Edge> edges,
                                bool symmetric);

  // Build from undirected pairs; each pair is inserted in both
  // directions. Self-loops are inserted once.
  static SparseGraph from_undirected(Index n, const std::vector<Edge>& pairs);

  // Adopt prebuilt CSR arrays. Checks shape and index order but not the
  // sign of the values; `symmetric` is taken on trust.
  static SparseGraph from_csr(Index n, std::vector<Index> row_ptr,
                              std::vector<Index> col_idx,
                              std::vector<Real> values, bool symmetric);

  Index num_nodes() const { return n_; }
  // Stored directed entries; an undirected edge counts twice.
  Index num_entries() const { return static_cast<Index>(col_idx_.size()); }
  bool symmetric() const { return symmetric_; }

  std::span<const Index> neighbors(Index i) const;
  std::span<const Real> edge_weights(Index i) const;

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<Real>& values() const { return values_; }

  // Weighted row sums (self-loops included).
  std::vector<Real> degrees() const;

  bool has_edge(Index i, Index j) const;
  // Stored weight, or 0 when the entry is absent.
  Real weight(Index i, Index j) const;

  // Subgraph induced by `nodes` (strictly ascending original ids).
  // Node k of the result corresponds to nodes[k].
  SparseGraph induced_subgraph(std::span<const Index> nodes) const;

 private:
  Index n_ = 0;
  bool symmetric_ = true;
  std::vector<Index> row_ptr_ = {0};
  std::vector<Index> col_idx_;
  std::vector<Real> values_;
};

}  // namespace garner
