#include "garner/views.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "garner/graph_ops.hpp"
#include "garner/rng.hpp"
#include "garner/spectral.hpp"

namespace garner {

void ViewSet::validate() const {
  const Index n = g0.num_nodes();
  if (g1.num_nodes() != n || g2.num_nodes() != n || gneg.num_nodes() != n) {
    throw DimensionError("view graphs disagree on the node count");
  }
}

Real config_similarity(std::span<const Real> ci, std::span<const Real> cj) {
  if (ci.size() != cj.size()) {
    throw DimensionError("configuration vectors differ in dimension");
  }
  Real sq = 0.0;
  for (std::size_t t = 0; t < ci.size(); ++t) {
    const Real d = ci[t] - cj[t];
    sq += d * d;
  }
  return 1.0 / (1.0 + std::sqrt(sq));
}

SparseGraph knn_similarity_graph(const DenseMatrix& c, Index k) {
  const Index n = c.rows();
  if (k < 1 || k >= n) {
    throw InvalidArgument("kNN degree must satisfy 1 <= k < n");
  }
  // Highest similarity = smallest distance; compare on squared distance
  // with the id as tiebreak.
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * k));
  std::vector<std::pair<Real, Index>> cand(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[w++] = {(c.row(i) - c.row(j)).squaredNorm(), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (Index t = 0; t < k; ++t) {
      const Index j = cand[static_cast<std::size_t>(t)].second;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, 1.0});
  return SparseGraph::from_undirected(n, edges);
}

DenseMatrix ppr_dense(const SparseGraph& g, Real alpha, int terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("teleport probability must lie in (0, 1)");
  }
  if (terms < 0) throw InvalidArgument("series length must be non-negative");
  const Index n = g.num_nodes();
  const SparseGraph m = normalize_no_self_loops(g);

  // P = alpha * sum_t ((1-alpha) M)^t applied to I, accumulated term
  // by term; the tail after `terms` powers is below (1-alpha)^terms.
  DenseMatrix term = DenseMatrix::Identity(n, n);
  DenseMatrix acc = term;
  for (int t = 1; t <= terms; ++t) {
    term = (1.0 - alpha) * spmm(m, term);
    acc += term;
  }
  return alpha * acc;
}

SparseGraph ppr_diffusion(const SparseGraph& g, Real alpha, int terms,
                          Index topk) {
  if (topk < 1) throw InvalidArgument("topk must be positive");
  const Index n = g.num_nodes();
  const DenseMatrix p = ppr_dense(g, alpha, terms);

  // Keep the topk largest entries per row, value ties toward the lower
  // column id, then take the elementwise max with the transpose.
  const Index keep = std::min(topk, n);
  std::vector<std::vector<std::pair<Index, Real>>> kept(
      static_cast<std::size_t>(n));
  std::vector<std::pair<Real, Index>> cand(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      // Negated id so that sorting descending by value prefers lower j.
      cand[static_cast<std::size_t>(j)] = {p(i, j), -j};
    }
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end(),
                      std::greater<>());
    auto& row = kept[static_cast<std::size_t>(i)];
    for (Index t = 0; t < keep; ++t) {
      const auto& [v, nj] = cand[static_cast<std::size_t>(t)];
      if (v > 0.0) row.emplace_back(-nj, v);
    }
    std::sort(row.begin(), row.end());
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Real> values;
  for (Index i = 0; i < n; ++i) {
    // Merge row i's kept entries with the kept entries pointing at i.
    const auto& own = kept[static_cast<std::size_t>(i)];
    std::vector<std::pair<Index, Real>> merged = own;
    for (Index j = 0; j < n; ++j) {
      const auto& other = kept[static_cast<std::size_t>(j)];
      const auto it = std::lower_bound(
          other.begin(), other.end(), std::pair<Index, Real>{i, 0.0},
          [](const auto& a, const auto& b) { return a.first < b.first; });
      if (it != other.end() && it->first == i) {
        merged.emplace_back(j, it->second);
      }
    }
    std::sort(merged.begin(), merged.end());
    Index last = -1;
    for (const auto& [j, v] : merged) {
      if (j == last) {
        values.back() = std::max(values.back(), v);
      } else {
        col_idx.push_back(j);
        values.push_back(v);
        last = j;
      }
    }
    row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<Index>(col_idx.size());
  }
  return SparseGraph::from_csr(n, std::move(row_ptr), std::move(col_idx),
                               std::move(values), /*symmetric=*/true);
}

namespace {

// One stub-pairing attempt. Pairs unmatched stubs uniformly, rejecting
// self-loops and repeats a bounded number of times before giving up on
// the attempt.
bool try_pair_regular(Index n, Index d, std::mt19937_64& rng,
                      std::vector<std::pair<Index, Index>>& pairs) {
  pairs.clear();
  std::vector<Index> stubs(static_cast<std::size_t>(n * d));
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < d; ++t) stubs[static_cast<std::size_t>(i * d + t)] = i;

  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  auto connected = [&](Index a, Index b) {
    const auto& row = adj[static_cast<std::size_t>(a)];
    return std::find(row.begin(), row.end(), b) != row.end();
  };

  std::size_t live = stubs.size();
  while (live > 0) {
    // First stub is fixed; sample a compatible partner among the rest.
    const Index a = stubs[0];
    bool paired = false;
    for (int tries = 0; tries < 64; ++tries) {
      const std::size_t pick =
          1 + static_cast<std::size_t>(rng() % (live - 1));
      const Index b = stubs[pick];
      if (b == a || connected(a, b)) continue;
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
      pairs.emplace_back(std::min(a, b), std::max(a, b));
      stubs[pick] = stubs[live - 1];
      stubs[0] = stubs[live - 2];
      live -= 2;
      stubs.resize(live);
      paired = true;
      break;
    }
    if (!paired) return false;  // stuck tail; restart the attempt
  }
  return true;
}

}  // namespace

SparseGraph regular_negative_graph(Index n, Index d, std::uint64_t seed,
                                   const RegularGraphOptions& opts) {
  if (d < 1 || d >= n) {
    throw InvalidArgument("regular degree must satisfy 1 <= d < n");
  }
  if ((n * d) % 2 != 0) {
    throw InvalidArgument("n * d must be even to form a d-regular graph");
  }

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    std::mt19937_64 rng =
        make_rng(seed, streams::kNegativeGraph, static_cast<std::uint64_t>(attempt));
    std::vector<std::pair<Index, Index>> pairs;
    bool built = false;
    for (int restart = 0; restart < 200 && !built; ++restart) {
      built = try_pair_regular(n, d, rng, pairs);
    }
    if (!built) continue;

    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) edges.push_back({a, b, 1.0});
    SparseGraph g = SparseGraph::from_undirected(n, edges);

    if (!opts.certify || n > opts.certify_max_nodes) return g;
    if (certify_regular_spectrum(g, d).pass) return g;
  }
  throw CertificationError(
      "no certified " + std::to_string(d) + "-regular graph on " +
      std::to_string(n) + " nodes within " +
      std::to_string(opts.max_attempts) + " attempts");
}

std::vector<Index> random_row_permutation(Index n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("permutation needs at least two rows");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::mt19937_64 rng = make_rng(seed, streams::kShuffle);
  while (true) {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
      const Index j =
          static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(j)]);
    }
    for (Index i = 0; i < n; ++i) {
      if (perm[static_cast<std::size_t>(i)] != i) return perm;
    }
    // Identity drawn (probability 1/n!); redraw.
  }
}

DenseMatrix shuffle_rows(const DenseMatrix& h, std::uint64_t seed) {
  const std::vector<Index> perm = random_row_permutation(h.rows(), seed);
  return permute_rows(h, perm);
}

}  // namespace garner
