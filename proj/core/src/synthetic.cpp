#include "garner/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "garner/rng.hpp"

namespace garner {
namespace {

using Point = std::array<Real, 2>;

Real dist2(const Point& a, const Point& b) {
  const Real dx = a[0] - b[0];
  const Real dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

// Union-symmetrized spatial kNN edge set; ties broken by lower id.
std::vector<Edge> spatial_knn_edges(const std::vector<Point>& pts, Index k) {
  const Index n = static_cast<Index>(pts.size());
  std::vector<std::pair<Index, Index>> pairs;
  std::vector<std::pair<Real, Index>> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back(dist2(pts[static_cast<std::size_t>(i)],
                              pts[static_cast<std::size_t>(j)]),
                        j);
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
  return edges;
}

bool is_connected(Index n, const std::vector<Edge>& edges) {
  if (n == 0) return true;
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::queue<Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  Index reached = 1;
  while (!frontier.empty()) {
    const Index v = frontier.front();
    frontier.pop();
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

}  // namespace

SyntheticData generate_synthetic(Index n, Index clusters, std::uint64_t seed,
                                 const SyntheticOptions& opts) {
  if (clusters < 2 || n < clusters) {
    throw InvalidArgument("need n >= clusters >= 2");
  }
  if (clusters > kMaxFunctionClasses) {
    throw InvalidArgument("at most " + std::to_string(kMaxFunctionClasses) +
                          " clusters map onto function classes");
  }
  if (opts.k_spatial < 1 || opts.config_dim < 1 || opts.feature_dim < 3 ||
      opts.noise_scale < 0.0) {
    throw InvalidArgument("bad synthetic options");
  }

  std::mt19937_64 rng = make_rng(seed, streams::kSynthetic);
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  std::normal_distribution<Real> gauss(0.0, 1.0);
  const Index k = std::min(opts.k_spatial, n - 1);

  // Topology: resample point sets until the union kNN graph connects.
  // Tiny instances (n < 50) are accepted as drawn.
  std::vector<Point> pts(static_cast<std::size_t>(n));
  std::vector<Edge> edges;
  for (int attempt = 0;; ++attempt) {
    for (auto& p : pts) p = {unit(rng), unit(rng)};
    edges = spatial_knn_edges(pts, k);
    if (n < 50 || is_connected(n, edges)) break;
    if (attempt + 1 >= opts.max_resamples) {
      throw StructureError("no connected spatial kNN graph within " +
                           std::to_string(opts.max_resamples) + " resamples");
    }
  }

  SyntheticData out;
  RoadDataset& ds = out.dataset;
  ds.graph = SparseGraph::from_undirected(n, edges);
  ds.positions = pts;
  ds.has_config.assign(static_cast<std::size_t>(n), 1);

  // Balanced cluster ids, then shuffled: every cluster is non-empty and
  // membership is independent of position.
  std::vector<int> label(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    label[static_cast<std::size_t>(i)] = static_cast<int>(i % clusters);
  }
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(label[static_cast<std::size_t>(i)],
              label[static_cast<std::size_t>(j)]);
  }

  // Cluster centroids in configuration space and their minimum spacing,
  // which sets the noise scale.
  const Index c_dim = opts.config_dim;
  DenseMatrix centroids(clusters, c_dim);
  for (Index a = 0; a < clusters; ++a)
    for (Index b = 0; b < c_dim; ++b) centroids(a, b) = gauss(rng);
  Real spacing = std::numeric_limits<Real>::infinity();
  for (Index a = 0; a < clusters; ++a) {
    for (Index b = a + 1; b < clusters; ++b) {
      spacing = std::min(spacing,
                         (centroids.row(a) - centroids.row(b)).norm());
    }
  }

  const Real sigma = opts.noise_scale * spacing;
  ds.C = DenseMatrix(n, c_dim);
  for (Index i = 0; i < n; ++i) {
    for (Index b = 0; b < c_dim; ++b) {
      ds.C(i, b) =
          centroids(label[static_cast<std::size_t>(i)], b) + sigma * gauss(rng);
    }
  }

  // Basic road features: position, normalized degree, then noise
  // columns. Deliberately free of cluster signal.
  const std::vector<Real> deg = ds.graph.degrees();
  const Real max_deg =
      std::max(Real(1), *std::max_element(deg.begin(), deg.end()));
  ds.X = DenseMatrix(n, opts.feature_dim);
  for (Index i = 0; i < n; ++i) {
    ds.X(i, 0) = pts[static_cast<std::size_t>(i)][0];
    ds.X(i, 1) = pts[static_cast<std::size_t>(i)][1];
    ds.X(i, 2) = deg[static_cast<std::size_t>(i)] / max_deg;
    for (Index b = 3; b < opts.feature_dim; ++b) ds.X(i, b) = gauss(rng);
  }

  out.function.task = Task::kFunction;
  out.function.classes = label;

  // Traffic: a fixed linear functional of C plus noise, offset into a
  // plausible positive speed range.
  Vector w(c_dim);
  const Real w_scale = 1.0 / std::sqrt(static_cast<Real>(c_dim));
  for (Index b = 0; b < c_dim; ++b) w(b) = w_scale * gauss(rng);
  out.traffic.task = Task::kTraffic;
  out.traffic.speeds.assign(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i) {
    out.traffic.speeds[static_cast<std::size_t>(i)] =
        30.0 + ds.C.row(i).dot(w) + opts.speed_noise * gauss(rng);
  }

  // Retrieval: noisy copies of distinct roads' configuration rows.
  const Index q = opts.num_queries > 0
                      ? std::min(opts.num_queries, n)
                      : std::max<Index>(1, n / 10);
  std::vector<Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Index{0});
  for (Index t = 0; t < q; ++t) {
    const Index j =
        t + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - t));
    std::swap(ids[static_cast<std::size_t>(t)], ids[static_cast<std::size_t>(j)]);
  }
  out.retrieval.task = Task::kRetrieval;
  out.retrieval.queries = DenseMatrix(q, c_dim);
  out.retrieval.query_truth.assign(static_cast<std::size_t>(q), 0);
  const Real q_sigma = opts.query_noise * spacing;
  for (Index t = 0; t < q; ++t) {
    const Index src = ids[static_cast<std::size_t>(t)];
    out.retrieval.query_truth[static_cast<std::size_t>(t)] = src;
    for (Index b = 0; b < c_dim; ++b) {
      out.retrieval.queries(t, b) = ds.C(src, b) + q_sigma * gauss(rng);
    }
  }

  ds.validate();
  out.function.validate(n);
  out.traffic.validate(n);
  out.retrieval.validate(n);
  return out;
}

}  // namespace garner
