#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "garner/graph_ops.hpp"
#include "garner/sparse_graph.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace garner {
namespace {

SparseGraph path3() {
  return SparseGraph::from_undirected(3, {{0, 1, 1.0}, {1, 2, 1.0}});
}

TEST(SparseGraphTest, RejectsOutOfRangeNode) {
  EXPECT_THROW(SparseGraph::from_undirected(2, {{0, 2, 1.0}}), StructureError);
  EXPECT_THROW(SparseGraph::from_undirected(2, {{-1, 0, 1.0}}), StructureError);
}

TEST(SparseGraphTest, RejectsDuplicateEdge) {
  EXPECT_THROW(
      SparseGraph::from_undirected(3, {{0, 1, 1.0}, {1, 0, 2.0}}),
      StructureError);
}

TEST(SparseGraphTest, RejectsNegativeOrNonFiniteWeight) {
  EXPECT_THROW(SparseGraph::from_undirected(2, {{0, 1, -1.0}}), StructureError);
  EXPECT_THROW(SparseGraph::from_undirected(2, {{0, 1, std::nan("")}}),
               StructureError);
}

TEST(SparseGraphTest, RejectsAsymmetricClaim) {
  EXPECT_THROW(
      SparseGraph::from_edges(2, {{0, 1, 1.0}}, /*symmetric=*/true),
      StructureError);
  EXPECT_THROW(
      SparseGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 2.0}},
                              /*symmetric=*/true),
      StructureError);
}

TEST(SparseGraphTest, StoresBothDirectionsSorted) {
  const SparseGraph g = path3();
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_entries(), 4);
  ASSERT_EQ(g.neighbors(1).size(), 2u);
  EXPECT_EQ(g.neighbors(1)[0], 0);
  EXPECT_EQ(g.neighbors(1)[1], 2);
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(0, 2));
  EXPECT_DOUBLE_EQ(g.weight(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(g.weight(0, 2), 0.0);
}

TEST(SparseGraphTest, DegreesIncludeSelfLoops) {
  const SparseGraph g =
      SparseGraph::from_undirected(2, {{0, 0, 2.0}, {0, 1, 1.0}});
  const auto deg = g.degrees();
  EXPECT_DOUBLE_EQ(deg[0], 3.0);
  EXPECT_DOUBLE_EQ(deg[1], 1.0);
}

TEST(SparseGraphTest, InducedSubgraphKeepsInternalEdges) {
  // Square 0-1-2-3-0 plus chord 0-2; keep {0, 1, 2}.
  const SparseGraph g = SparseGraph::from_undirected(
      4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}, {3, 0, 1.0}, {0, 2, 5.0}});
  const std::vector<Index> keep = {0, 1, 2};
  const SparseGraph sub = g.induced_subgraph(keep);
  EXPECT_EQ(sub.num_nodes(), 3);
  EXPECT_DOUBLE_EQ(sub.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(sub.weight(1, 2), 2.0);
  EXPECT_DOUBLE_EQ(sub.weight(0, 2), 5.0);
  EXPECT_FALSE(sub.has_edge(2, 0) && sub.weight(2, 0) == 1.0);  // 3 dropped
}

TEST(SparseGraphTest, InducedSubgraphRequiresAscendingIds) {
  const SparseGraph g = path3();
  const std::vector<Index> bad = {2, 0};
  EXPECT_THROW(g.induced_subgraph(bad), StructureError);
}

TEST(NormalizeTest, SingleNodeBecomesUnit) {
  const SparseGraph g = SparseGraph::from_undirected(1, {});
  const SparseGraph s = normalize_adjacency(g);
  EXPECT_DOUBLE_EQ(s.weight(0, 0), 1.0);
}

TEST(NormalizeTest, SelfLoopMergesWithImplicitLoop) {
  // One node with a weight-2 self-loop: (2+1)/(2+1) = 1.
  const SparseGraph g = SparseGraph::from_undirected(1, {{0, 0, 2.0}});
  const SparseGraph s = normalize_adjacency(g);
  EXPECT_DOUBLE_EQ(s.weight(0, 0), 1.0);
}

TEST(NormalizeTest, PathGraphMatchesHandComputation) {
  const SparseGraph s = normalize_adjacency(path3());
  constexpr double kTol = 1e-15;
  EXPECT_NEAR(s.weight(0, 0), 0.5, kTol);
  EXPECT_NEAR(s.weight(0, 1), 1.0 / std::sqrt(6.0), kTol);
  EXPECT_NEAR(s.weight(1, 1), 1.0 / 3.0, kTol);
  EXPECT_NEAR(s.weight(1, 2), 1.0 / std::sqrt(6.0), kTol);
  EXPECT_NEAR(s.weight(2, 2), 0.5, kTol);
  EXPECT_DOUBLE_EQ(s.weight(0, 2), 0.0);
}

TEST(NormalizeTest, RequiresSymmetricInput) {
  const SparseGraph g =
      SparseGraph::from_edges(2, {{0, 1, 1.0}}, /*symmetric=*/false);
  EXPECT_THROW(normalize_adjacency(g), StructureError);
  EXPECT_THROW(normalize_no_self_loops(g), StructureError);
}

TEST(NormalizeTest, OutputExactlySymmetric) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseGraph g = testutil::random_graph(rng, 60, 0.1, false);
    const SparseGraph s = normalize_adjacency(g);
    for (Index i = 0; i < s.num_nodes(); ++i) {
      auto cols = s.neighbors(i);
      auto vals = s.edge_weights(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        // Bit-identical, not merely close.
        EXPECT_EQ(vals[k], s.weight(cols[k], i));
      }
    }
  }
}

TEST(NormalizeTest, MatchesDenseOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseGraph g = testutil::random_graph(rng, 40, 0.15, false);
    const oracle::Dense want = oracle::sym_normalize(oracle::from_graph(g), true);
    const SparseGraph s = normalize_adjacency(g);
    for (Index i = 0; i < g.num_nodes(); ++i) {
      for (Index j = 0; j < g.num_nodes(); ++j) {
        EXPECT_NEAR(s.weight(i, j), want.at(i, j), 1e-14);
      }
    }
  }
}

TEST(NormalizeTest, NoSelfLoopVariantKeepsBareNumerator) {
  const SparseGraph g = SparseGraph::from_undirected(2, {{0, 1, 1.0}});
  const SparseGraph m = normalize_no_self_loops(g);
  EXPECT_DOUBLE_EQ(m.weight(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.weight(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.weight(1, 0), 0.5);
}

TEST(NormalizeTest, PlainVariantDividesRegularGraphByDegree) {
  // 4-cycle is 2-regular: every stored entry becomes 1/2.
  const SparseGraph c4 = SparseGraph::from_undirected(
      4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  const SparseGraph m = normalize_plain(c4);
  for (Index i = 0; i < 4; ++i) {
    for (Real v : m.edge_weights(i)) EXPECT_DOUBLE_EQ(v, 0.5);
  }
}

TEST(NormalizeTest, PlainVariantLeavesIsolatedRowsZero) {
  const SparseGraph g = SparseGraph::from_undirected(3, {{0, 1, 1.0}});
  const SparseGraph m = normalize_plain(g);
  EXPECT_EQ(m.neighbors(2).size(), 0u);
  EXPECT_DOUBLE_EQ(m.weight(0, 1), 1.0);
}

TEST(NormalizeTest, PlainVariantMatchesDenseOracle) {
  std::mt19937_64 rng(47);
  const SparseGraph g = testutil::random_graph(rng, 35, 0.2, false);
  const oracle::Dense want =
      oracle::sym_normalize(oracle::from_graph(g), false, false);
  const SparseGraph m = normalize_plain(g);
  for (Index i = 0; i < g.num_nodes(); ++i)
    for (Index j = 0; j < g.num_nodes(); ++j)
      EXPECT_NEAR(m.weight(i, j), want.at(i, j), 1e-14);
}

TEST(LaplacianTest, PathGraphHandValues) {
  const SparseGraph lap = laplacian(path3());
  EXPECT_DOUBLE_EQ(lap.weight(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(lap.weight(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(lap.weight(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(lap.weight(1, 2), -1.0);
  EXPECT_DOUBLE_EQ(lap.weight(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(lap.weight(0, 2), 0.0);
}

TEST(LaplacianTest, EmptyGraphIsZero) {
  const SparseGraph lap = laplacian(SparseGraph::from_undirected(4, {}));
  EXPECT_EQ(lap.num_entries(), 0);
}

TEST(LaplacianTest, SelfLoopsCancel) {
  const SparseGraph g =
      SparseGraph::from_undirected(2, {{0, 0, 3.0}, {0, 1, 1.0}});
  const SparseGraph lap = laplacian(g);
  EXPECT_DOUBLE_EQ(lap.weight(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(lap.weight(0, 1), -1.0);
}

TEST(LaplacianTest, RowSumsExactlyZeroOnIntegerWeights) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseGraph g = testutil::random_graph(rng, 50, 0.12, true);
    const SparseGraph lap = laplacian(g);
    for (Index i = 0; i < lap.num_nodes(); ++i) {
      Real sum = 0.0;
      for (Real v : lap.edge_weights(i)) sum += v;
      EXPECT_EQ(sum, 0.0);
    }
  }
}

TEST(DirichletTest, IdenticalRowsGiveZero) {
  std::mt19937_64 rng(5);
  const SparseGraph g = testutil::random_graph(rng, 30, 0.2, false);
  DenseMatrix z(30, 4);
  for (Index i = 0; i < 30; ++i) z.row(i) << 1.0, -2.0, 0.5, 3.0;
  EXPECT_DOUBLE_EQ(dirichlet_energy(z, g), 0.0);
}

TEST(DirichletTest, SingleEdgeUnitGap) {
  const SparseGraph g = SparseGraph::from_undirected(2, {{0, 1, 1.0}});
  DenseMatrix z(2, 1);
  z << 0.0, 1.0;
  EXPECT_DOUBLE_EQ(dirichlet_energy(z, g), 1.0);
}

TEST(DirichletTest, MatchesTraceForm) {
  std::mt19937_64 rng(13);
  const SparseGraph g = testutil::random_graph(rng, 50, 0.15, false);
  const DenseMatrix z = testutil::random_matrix(rng, 50, 8);
  const Real edge_form = dirichlet_energy(z, g);
  const Real trace_form = oracle::trace_quadratic(
      oracle::from_eigen(z), oracle::laplacian(oracle::from_graph(g)));
  EXPECT_LT(testutil::rel_err(edge_form, trace_form), 1e-9);
}

TEST(DirichletTest, NonNegativeOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 5 + static_cast<Index>(rng() % 40);
    const SparseGraph g = testutil::random_graph(rng, n, 0.2, false);
    const DenseMatrix z = testutil::random_matrix(rng, n, 3);
    EXPECT_GE(dirichlet_energy(z, g), 0.0);
  }
}

TEST(DirichletTest, RejectsRowMismatch) {
  const SparseGraph g = path3();
  const DenseMatrix z = DenseMatrix::Zero(2, 2);
  EXPECT_THROW(dirichlet_energy(z, g), DimensionError);
}

TEST(SpmmTest, SelfLoopGraphScalesRows) {
  const SparseGraph g =
      SparseGraph::from_undirected(2, {{0, 0, 2.0}, {1, 1, 3.0}});
  DenseMatrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  const DenseMatrix y = spmm(g, x);
  EXPECT_DOUBLE_EQ(y(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(y(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(y(1, 0), 9.0);
  EXPECT_DOUBLE_EQ(y(1, 1), 12.0);
}

TEST(SpmmTest, MatchesDenseProduct) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 10 + static_cast<Index>(rng() % 50);
    const SparseGraph g = testutil::random_graph(rng, n, 0.2, false);
    const DenseMatrix x = testutil::random_matrix(rng, n, 6);
    const DenseMatrix got = spmm(g, x);
    const DenseMatrix want = oracle::to_eigen(
        oracle::matmul(oracle::from_graph(g), oracle::from_eigen(x)));
    EXPECT_LT(testutil::rel_frobenius_diff(got, want), 1e-12);
  }
}

TEST(SpmmTest, RejectsRowMismatch) {
  const SparseGraph g = path3();
  EXPECT_THROW(spmm(g, DenseMatrix::Zero(2, 2)), DimensionError);
}

TEST(SpmmTest, PowerZeroCopiesInput) {
  std::mt19937_64 rng(23);
  const SparseGraph g = testutil::random_graph(rng, 10, 0.3, false);
  const DenseMatrix x = testutil::random_matrix(rng, 10, 3);
  EXPECT_EQ(spmm_power(g, x, 0), x);
}

TEST(SpmmTest, PowerMatchesDenseMatpow) {
  std::mt19937_64 rng(29);
  const SparseGraph g = testutil::random_graph(rng, 25, 0.2, false);
  const DenseMatrix x = testutil::random_matrix(rng, 25, 4);
  const DenseMatrix got = spmm_power(g, x, 3);
  const oracle::Dense a = oracle::from_graph(g);
  const DenseMatrix want = oracle::to_eigen(
      oracle::matmul(oracle::matpow(a, 3), oracle::from_eigen(x)));
  EXPECT_LT(testutil::rel_frobenius_diff(got, want), 1e-11);
}

TEST(PermuteRowsTest, ReordersByIndex) {
  DenseMatrix m(3, 2);
  m << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  const std::vector<Index> perm = {2, 0, 1};
  const DenseMatrix p = permute_rows(m, perm);
  EXPECT_DOUBLE_EQ(p(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(p(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(p(2, 1), 4.0);
}

}  // namespace
}  // namespace garner
