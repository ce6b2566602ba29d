#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "garner/encoder.hpp"
#include "garner/graph_ops.hpp"
#include "garner/spectral.hpp"
#include "garner/views.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace garner {
namespace {

SparseGraph complete_graph(Index n) {
  std::vector<Edge> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.push_back({i, j, 1.0});
  return SparseGraph::from_undirected(n, pairs);
}

TEST(ModelParams, InitShapesStreamsAndBounds) {
  const ModelParams params = ModelParams::init(5, 3, 4, 6, 42);
  EXPECT_EQ(params.w_c.rows(), 5);
  EXPECT_EQ(params.w_c.cols(), 4);
  EXPECT_EQ(params.w_x.rows(), 3);
  EXPECT_EQ(params.theta0.rows(), 8);
  EXPECT_EQ(params.theta0.cols(), 6);
  EXPECT_EQ(params.w_disc1.rows(), 6);
  EXPECT_EQ(params.w_disc1.cols(), 6);
  EXPECT_EQ(params.p(), 4);
  EXPECT_EQ(params.f(), 6);
  EXPECT_NO_THROW(params.validate());

  EXPECT_LE(params.w_c.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
  EXPECT_LE(params.theta0.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(8.0));

  // Same shape, distinct streams: the three propagation weights differ.
  EXPECT_GT(testutil::max_abs_diff(params.theta0, params.theta1), 0.0);
  EXPECT_GT(testutil::max_abs_diff(params.theta1, params.theta2), 0.0);
  EXPECT_GT(testutil::max_abs_diff(params.w_disc1, params.w_disc2), 0.0);

  const ModelParams again = ModelParams::init(5, 3, 4, 6, 42);
  EXPECT_EQ(testutil::max_abs_diff(params.w_c, again.w_c), 0.0);
  EXPECT_EQ(testutil::max_abs_diff(params.theta2, again.theta2), 0.0);
  const ModelParams other = ModelParams::init(5, 3, 4, 6, 43);
  EXPECT_GT(testutil::max_abs_diff(params.w_c, other.w_c), 0.0);
}

TEST(ModelParams, ValidateRejectsShapeDrift) {
  ModelParams params = ModelParams::init(5, 3, 4, 6, 0);
  params.theta1 = DenseMatrix::Zero(7, 6);
  EXPECT_THROW(params.validate(), DimensionError);
}

TEST(SgcForward, DepthZeroSkipsPropagation) {
  std::mt19937_64 rng(2);
  const SparseGraph g = testutil::random_graph(rng, 8, 0.4, false);
  const SparseGraph s = normalize_adjacency(g);
  const DenseMatrix h = testutil::random_matrix(rng, 8, 3);
  const DenseMatrix theta = testutil::random_matrix(rng, 3, 2);
  const DenseMatrix z = sgc_forward(s, h, theta, 0);
  EXPECT_LT(testutil::max_abs_diff(z, h * theta), 1e-14);
}

TEST(SgcForward, TwoNodePinnedAverage) {
  const SparseGraph s =
      normalize_adjacency(SparseGraph::from_undirected(2, {{0, 1, 1.0}}));
  const DenseMatrix z =
      sgc_forward(s, DenseMatrix::Identity(2, 2), DenseMatrix::Identity(2, 2), 1);
  // Normalized two-node operator averages: every entry is 1/2.
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) EXPECT_NEAR(z(i, j), 0.5, 1e-15);
}

TEST(SgcForward, MatchesDenseReferenceAtDepthThree) {
  std::mt19937_64 rng(13);
  const SparseGraph g = testutil::random_graph(rng, 100, 0.08, false);
  const DenseMatrix h = testutil::random_matrix(rng, 100, 7);
  const DenseMatrix theta = testutil::random_matrix(rng, 7, 4);
  const DenseMatrix z = sgc_forward(normalize_adjacency(g), h, theta, 3);
  const auto ref = oracle::dense_sgc(oracle::from_graph(g), oracle::from_eigen(h),
                                     oracle::from_eigen(theta), 3);
  EXPECT_LT(testutil::rel_frobenius_diff(z, oracle::to_eigen(ref)), 1e-10);
}

TEST(SgcForward, LinearInFeatures) {
  std::mt19937_64 rng(17);
  const SparseGraph g = testutil::random_graph(rng, 30, 0.2, false);
  const SparseGraph s = normalize_adjacency(g);
  const DenseMatrix h1 = testutil::random_matrix(rng, 30, 4);
  const DenseMatrix h2 = testutil::random_matrix(rng, 30, 4);
  const DenseMatrix theta = testutil::random_matrix(rng, 4, 3);
  const DenseMatrix lhs = sgc_forward(s, 2.0 * h1 - 0.5 * h2, theta, 2);
  const DenseMatrix rhs =
      2.0 * sgc_forward(s, h1, theta, 2) - 0.5 * sgc_forward(s, h2, theta, 2);
  EXPECT_LT(testutil::max_abs_diff(lhs, rhs), 1e-12);
}

// Propagation smooths: the quadratic edge-difference energy of the
// propagated signal never exceeds that of the input. Statistical claim,
// checked over many random graphs and signals.
TEST(SgcForward, PropagationNeverRaisesEdgeEnergy) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<Index> size(10, 60);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = size(rng);
    const SparseGraph g = testutil::random_graph(rng, n, 4.0 / n, true);
    if (g.num_entries() == 0) continue;
    const SparseGraph s = normalize_adjacency(g);
    const DenseMatrix h = testutil::random_matrix(rng, n, 3);
    const DenseMatrix smoothed = spmm_power(s, h, 2);
    EXPECT_LE(dirichlet_energy(smoothed, g), dirichlet_energy(h, g) + 1e-12);
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(NegativeSgc, CompleteGraphCollapsesToColumnMean) {
  const SparseGraph khat = normalize_adjacency(complete_graph(2));
  DenseMatrix h(2, 1);
  h << 1.0, 3.0;
  const DenseMatrix z = negative_sgc(khat, h, DenseMatrix::Identity(1, 1));
  EXPECT_NEAR(z(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(z(1, 0), 2.0, 1e-14);
}

TEST(NegativeSgc, CompleteGraphRowsAreIdentical) {
  std::mt19937_64 rng(23);
  const SparseGraph khat = normalize_adjacency(complete_graph(9));
  const DenseMatrix h = testutil::random_matrix(rng, 9, 4);
  const DenseMatrix theta = testutil::random_matrix(rng, 4, 3);
  const DenseMatrix z = negative_sgc(khat, h, theta);
  const DenseMatrix mean = ((h * theta).colwise().mean());
  for (Index i = 0; i < 9; ++i) {
    EXPECT_LT((z.row(i) - mean).cwiseAbs().maxCoeff(), 1e-12) << i;
  }
}

// On a certified d-regular negative graph every propagated row stays
// within the spectral mixing envelope of the column mean: deviation is
// at most (2 sqrt(d-1) / d) times the largest singular value of H Theta.
TEST(NegativeSgc, CertifiedRegularGraphMixesTowardMean) {
  std::mt19937_64 rng(29);
  const Index n = 100;
  const Index d = 22;
  const SparseGraph kneg = regular_negative_graph(n, d, 1);
  const SparseGraph khat = normalize_plain(kneg);
  const DenseMatrix h = testutil::random_matrix(rng, n, 6);
  const DenseMatrix theta = testutil::random_matrix(rng, 6, 4);
  const DenseMatrix b = h * theta;
  const DenseMatrix z = negative_sgc(khat, h, theta);

  const auto gram = oracle::matmul(
      oracle::from_eigen(DenseMatrix(b.transpose())), oracle::from_eigen(b));
  const auto gram_evs = oracle::sym_eigenvalues(gram);
  const Real sigma_max = std::sqrt(gram_evs.back());
  const Real envelope = 2.0 * std::sqrt(21.0) / 22.0 * sigma_max;

  const Eigen::RowVectorXd mean = b.colwise().mean();
  for (Index i = 0; i < n; ++i) {
    EXPECT_LE((z.row(i) - mean).norm(), envelope * (1.0 + 1e-9)) << i;
  }
}

TEST(MeanPool, PinnedAndOracleCases) {
  DenseMatrix single(1, 3);
  single << 4.0, -1.0, 0.5;
  const Vector s = mean_pool(single);
  EXPECT_EQ(s(0), 4.0);
  EXPECT_EQ(s(2), 0.5);

  std::mt19937_64 rng(31);
  const DenseMatrix z = testutil::random_matrix(rng, 12, 5);
  DenseMatrix mirrored(24, 5);
  mirrored << z, -z;
  EXPECT_LT(mean_pool(mirrored).cwiseAbs().maxCoeff(), 1e-15);

  const Vector pooled = mean_pool(z);
  for (Index j = 0; j < 5; ++j) {
    Real acc = 0.0;
    for (Index i = 0; i < 12; ++i) acc += z(i, j);
    EXPECT_NEAR(pooled(j), acc / 12.0, 1e-14);
  }

  EXPECT_THROW(mean_pool(DenseMatrix(0, 3)), DimensionError);
}

TEST(Checkpoint, RoundTripAndRewriteStability) {
  const ModelParams params = ModelParams::init(4, 3, 2, 5, 7);
  testutil::TempDir dir("ckpt");
  save_checkpoint(dir / "a.grnp", params);
  const ModelParams back = load_checkpoint(dir / "a.grnp");
  EXPECT_NO_THROW(back.validate());
  EXPECT_EQ(back.w_c.rows(), 4);
  EXPECT_EQ(back.theta2.cols(), 5);

  // Values pass through f32; a second save/load cycle is exact.
  save_checkpoint(dir / "b.grnp", back);
  EXPECT_EQ(testutil::read_bytes(dir / "a.grnp"),
            testutil::read_bytes(dir / "b.grnp"));
  const ModelParams twice = load_checkpoint(dir / "b.grnp");
  EXPECT_EQ(testutil::max_abs_diff(back.w_c, twice.w_c), 0.0);
  EXPECT_EQ(testutil::max_abs_diff(back.w_disc2, twice.w_disc2), 0.0);

  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 2; ++j) {
      EXPECT_EQ(back.w_c(i, j),
                static_cast<Real>(static_cast<float>(params.w_c(i, j))));
    }
  }
}

TEST(Checkpoint, RejectsForeignOrTruncatedFiles) {
  testutil::TempDir dir("ckpt_bad");
  {
    std::ofstream out(dir / "junk.grnp", std::ios::binary);
    out << "NOPE" << std::string(64, '\0');
  }
  EXPECT_THROW(load_checkpoint(dir / "junk.grnp"), IoError);
  EXPECT_THROW(load_checkpoint(dir / "missing.grnp"), IoError);

  const ModelParams params = ModelParams::init(3, 2, 2, 3, 1);
  save_checkpoint(dir / "ok.grnp", params);
  const auto bytes = testutil::read_bytes(dir / "ok.grnp");
  {
    std::ofstream out(dir / "cut.grnp", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  EXPECT_THROW(load_checkpoint(dir / "cut.grnp"), IoError);
}

}  // namespace
}  // namespace garner
