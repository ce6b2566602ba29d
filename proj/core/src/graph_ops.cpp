#include "garner/graph_ops.hpp"

#include <cmath>
#include <vector>

namespace garner {
namespace {

void require_symmetric(const SparseGraph& g, const char* op) {
  if (!g.symmetric()) {
    throw StructureError(std::string(op) + " requires a symmetric graph");
  }
}

// Shared core of the three normalizations. `add_loops` controls the +I
// term in the numerator, `loop_in_scaling` the +1 in the degrees.
SparseGraph normalize_impl(const SparseGraph& g, bool add_loops,
                           bool loop_in_scaling) {
  const Index n = g.num_nodes();
  std::vector<Real> inv_sqrt(static_cast<std::size_t>(n));
  {
    std::vector<Real> deg = g.degrees();
    for (Index i = 0; i < n; ++i) {
      const Real d =
          deg[static_cast<std::size_t>(i)] + (loop_in_scaling ? 1.0 : 0.0);
      inv_sqrt[static_cast<std::size_t>(i)] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Real> values;
  col_idx.reserve(static_cast<std::size_t>(g.num_entries()) +
                  (add_loops ? static_cast<std::size_t>(n) : 0));
  values.reserve(col_idx.capacity());

  for (Index i = 0; i < n; ++i) {
    auto cols = g.neighbors(i);
    auto vals = g.edge_weights(i);
    const Real di = inv_sqrt[static_cast<std::size_t>(i)];
    bool loop_done = !add_loops;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index j = cols[k];
      if (!loop_done && j > i) {
        col_idx.push_back(i);
        values.push_back(di * di);
        loop_done = true;
      }
      Real w = vals[k];
      if (add_loops && j == i) {
        w += 1.0;
        loop_done = true;
      }
      const Real dj = inv_sqrt[static_cast<std::size_t>(j)];
      // (di * dj) first: multiplication commutes exactly, so the
      // mirrored entry comes out bit-identical.
      col_idx.push_back(j);
      values.push_back(w * (di * dj));
    }
    if (!loop_done) {
      col_idx.push_back(i);
      values.push_back(di * di);
    }
    row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<Index>(col_idx.size());
  }
  return SparseGraph::from_csr(n, std::move(row_ptr), std::move(col_idx),
                               std::move(values), /*symmetric=*/true);
}

}  // namespace

SparseGraph normalize_adjacency(const SparseGraph& g) {
  require_symmetric(g, "normalize_adjacency");
  return normalize_impl(g, /*add_loops=*/true, /*loop_in_scaling=*/true);
}

SparseGraph normalize_no_self_loops(const SparseGraph& g) {
  require_symmetric(g, "normalize_no_self_loops");
  return normalize_impl(g, /*add_loops=*/false, /*loop_in_scaling=*/true);
}

SparseGraph normalize_plain(const SparseGraph& g) {
  require_symmetric(g, "normalize_plain");
  return normalize_impl(g, /*add_loops=*/false, /*loop_in_scaling=*/false);
}

SparseGraph laplacian(const SparseGraph& g) {
  require_symmetric(g, "laplacian");
  const Index n = g.num_nodes();
  const std::vector<Real> deg = g.degrees();

  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Real> values;
  col_idx.reserve(static_cast<std::size_t>(g.num_entries()) +
                  static_cast<std::size_t>(n));
  values.reserve(col_idx.capacity());

  for (Index i = 0; i < n; ++i) {
    auto cols = g.neighbors(i);
    auto vals = g.edge_weights(i);
    const Real diag = deg[static_cast<std::size_t>(i)] - g.weight(i, i);
    bool diag_emitted = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index j = cols[k];
      if (j == i) {
        if (diag != 0.0) {
          col_idx.push_back(i);
          values.push_back(diag);
        }
        diag_emitted = true;
        continue;
      }
      if (!diag_emitted && j > i) {
        if (diag != 0.0) {
          col_idx.push_back(i);
          values.push_back(diag);
        }
        diag_emitted = true;
      }
      if (vals[k] != 0.0) {
        col_idx.push_back(j);
        values.push_back(-vals[k]);
      }
    }
    if (!diag_emitted && diag != 0.0) {
      col_idx.push_back(i);
      values.push_back(diag);
    }
    row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<Index>(col_idx.size());
  }
  return SparseGraph::from_csr(n, std::move(row_ptr), std::move(col_idx),
                               std::move(values), /*symmetric=*/true);
}

Real dirichlet_energy(const DenseMatrix& z, const SparseGraph& g) {
  if (z.rows() != g.num_nodes()) {
    throw DimensionError("embedding rows do not match graph nodes");
  }
  Real acc = 0.0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    auto cols = g.neighbors(i);
    auto vals = g.edge_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index j = cols[k];
      if (j == i) continue;
      acc += vals[k] * (z.row(i) - z.row(j)).squaredNorm();
    }
  }
  return 0.5 * acc;
}

DenseMatrix spmm(const SparseGraph& g, const DenseMatrix& x) {
  if (x.rows() != g.num_nodes()) {
    throw DimensionError("spmm: dense rows do not match graph nodes");
  }
  DenseMatrix out = DenseMatrix::Zero(g.num_nodes(), x.cols());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    auto cols = g.neighbors(i);
    auto vals = g.edge_weights(i);
    auto row = out.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      row += vals[k] * x.row(cols[k]);
    }
  }
  return out;
}

DenseMatrix spmm_power(const SparseGraph& g, const DenseMatrix& x, int k) {
  if (k < 0) throw InvalidArgument("spmm_power: negative exponent");
  DenseMatrix out = x;
  for (int t = 0; t < k; ++t) out = spmm(g, out);
  return out;
}

}  // namespace garner
