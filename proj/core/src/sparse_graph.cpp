#include "garner/sparse_graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace garner {
namespace {

void check_node_count(Index n) {
  if (n < 0) throw DimensionError("node count must be non-negative");
}

std::string edge_str(Index i, Index j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

SparseGraph SparseGraph::from_edges(Index n, std::vector<Edge> edges,
                                    bool symmetric) {
  check_node_count(n);
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw StructureError("edge " + edge_str(e.src, e.dst) +
                           " references a node outside [0, " +
                           std::to_string(n) + ")");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw StructureError("edge " + edge_str(e.src, e.dst) +
                           " has a negative or non-finite weight");
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i - 1].src == edges[i].src && edges[i - 1].dst == edges[i].dst) {
      throw StructureError("duplicate edge " +
                           edge_str(edges[i].src, edges[i].dst));
    }
  }

  SparseGraph g;
  g.n_ = n;
  g.symmetric_ = symmetric;
  g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.col_idx_.reserve(edges.size());
  g.values_.reserve(edges.size());
  for (const Edge& e : edges) {
    ++g.row_ptr_[static_cast<std::size_t>(e.src) + 1];
    g.col_idx_.push_back(e.dst);
    g.values_.push_back(e.weight);
  }
  for (Index i = 0; i < n; ++i) {
    g.row_ptr_[static_cast<std::size_t>(i) + 1] +=
        g.row_ptr_[static_cast<std::size_t>(i)];
  }

  if (symmetric) {
    for (Index i = 0; i < n; ++i) {
      auto cols = g.neighbors(i);
      auto vals = g.edge_weights(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const Index j = cols[k];
        if (i == j) continue;
        if (g.weight(j, i) != vals[k]) {
          throw StructureError("symmetric graph lacks a matching twin for " +
                               edge_str(i, j));
        }
      }
    }
  }
  return g;
}

SparseGraph SparseGraph::from_undirected(Index n,
                                         const std::vector<Edge>& pairs) {
  std::vector<Edge> directed;
  directed.reserve(pairs.size() * 2);
  for (const Edge& e : pairs) {
    directed.push_back(e);
    if (e.src != e.dst) directed.push_back({e.dst, e.src, e.weight});
  }
  return from_edges(n, std::move(directed), /*symmetric=*/true);
}

SparseGraph SparseGraph::from_csr(Index n, std::vector<Index> row_ptr,
                                  std::vector<Index> col_idx,
                                  std::vector<Real> values, bool symmetric) {
  check_node_count(n);
  if (row_ptr.size() != static_cast<std::size_t>(n) + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != static_cast<Index>(col_idx.size()) ||
      col_idx.size() != values.size()) {
    throw DimensionError("inconsistent CSR arrays");
  }
  for (Index i = 0; i < n; ++i) {
    const Index begin = row_ptr[static_cast<std::size_t>(i)];
    const Index end = row_ptr[static_cast<std::size_t>(i) + 1];
    if (begin > end) throw StructureError("row_ptr is not non-decreasing");
    for (Index k = begin; k < end; ++k) {
      const Index j = col_idx[static_cast<std::size_t>(k)];
      if (j < 0 || j >= n) throw StructureError("column index out of range");
      if (k > begin && col_idx[static_cast<std::size_t>(k) - 1] >= j) {
        throw StructureError("column indices must be strictly ascending");
      }
      if (!std::isfinite(values[static_cast<std::size_t>(k)])) {
        throw StructureError("CSR value is non-finite");
      }
    }
  }
  SparseGraph g;
  g.n_ = n;
  g.symmetric_ = symmetric;
  g.row_ptr_ = std::move(row_ptr);
  g.col_idx_ = std::move(col_idx);
  g.values_ = std::move(values);
  return g;
}

std::span<const Index> SparseGraph::neighbors(Index i) const {
  const auto begin = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
  const auto end = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
  return {col_idx_.data() + begin, end - begin};
}

std::span<const Real> SparseGraph::edge_weights(Index i) const {
  const auto begin = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
  const auto end = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
  return {values_.data() + begin, end - begin};
}

std::vector<Real> SparseGraph::degrees() const {
  std::vector<Real> deg(static_cast<std::size_t>(n_), 0.0);
  for (Index i = 0; i < n_; ++i) {
    Real sum = 0.0;
    for (Real w : edge_weights(i)) sum += w;
    deg[static_cast<std::size_t>(i)] = sum;
  }
  return deg;
}

bool SparseGraph::has_edge(Index i, Index j) const {
  auto cols = neighbors(i);
  return std::binary_search(cols.begin(), cols.end(), j);
}

Real SparseGraph::weight(Index i, Index j) const {
  auto cols = neighbors(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return edge_weights(i)[static_cast<std::size_t>(it - cols.begin())];
}

SparseGraph SparseGraph::induced_subgraph(std::span<const Index> nodes) const {
  const Index m = static_cast<Index>(nodes.size());
  std::vector<Index> position(static_cast<std::size_t>(n_), -1);
  for (Index k = 0; k < m; ++k) {
    const Index v = nodes[static_cast<std::size_t>(k)];
    if (v < 0 || v >= n_) throw StructureError("subgraph node id out of range");
    if (k > 0 && nodes[static_cast<std::size_t>(k) - 1] >= v) {
      throw StructureError("subgraph node ids must be strictly ascending");
    }
    position[static_cast<std::size_t>(v)] = k;
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Real> values;
  for (Index k = 0; k < m; ++k) {
    const Index v = nodes[static_cast<std::size_t>(k)];
    auto cols = neighbors(v);
    auto vals = edge_weights(v);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const Index pj = position[static_cast<std::size_t>(cols[t])];
      if (pj < 0) continue;
      col_idx.push_back(pj);  // ascending: original columns are ascending
      values.push_back(vals[t]);
    }
    row_ptr[static_cast<std::size_t>(k) + 1] =
        static_cast<Index>(col_idx.size());
  }
  return from_csr(m, std::move(row_ptr), std::move(col_idx), std::move(values),
                  symmetric_);
}

}  // namespace garner
