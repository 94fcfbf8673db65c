#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace wwl;
using namespace wwl::testing;

namespace {

EmbeddingMatrix categorical_rows(RowMatrix rows) {
  EmbeddingMatrix e;
  e.scheme = Scheme::categorical;
  e.iterations = static_cast<int>(rows.cols()) - 1;
  e.values = std::move(rows);
  return e;
}

}  // namespace

TEST(Hamming, Examples) {
  const auto a = categorical_rows((RowMatrix(1, 3) << 1, 5, 7).finished());
  const auto b = categorical_rows((RowMatrix(1, 3) << 1, 5, 9).finished());
  const auto c = categorical_rows((RowMatrix(1, 3) << 2, 6, 8).finished());
  EXPECT_DOUBLE_EQ(hamming_matrix(a, b).values(0, 0), 1.0 / 3.0);
  EXPECT_EQ(hamming_matrix(a, a).values(0, 0), 0.0);
  EXPECT_EQ(hamming_matrix(a, c).values(0, 0), 1.0);
}

TEST(Hamming, RejectsMismatchedWidth) {
  const auto a = categorical_rows(RowMatrix::Zero(1, 3));
  const auto b = categorical_rows(RowMatrix::Zero(1, 2));
  EXPECT_THROW(hamming_matrix(a, b), Error);
}

TEST(Hamming, DiscreteColumn) {
  const auto a = categorical_rows((RowMatrix(2, 2) << 1, 2, 1, 3).finished());
  const auto b = categorical_rows((RowMatrix(1, 2) << 1, 3).finished());
  EXPECT_EQ(discrete_matrix(a, b, 0), RowMatrix::Zero(2, 1));
  EXPECT_EQ(discrete_matrix(a, b, 1), (RowMatrix(2, 1) << 1, 0).finished());
}

// Once two nodes disagree at iteration h they disagree at every later one,
// so the per-column mismatch count never shrinks as H grows.
TEST(Hamming, MonotoneInIterations) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dataset ds;
    ds.graphs = {random_labelled(7, 0.3, 3, seed), random_labelled(6, 0.4, 3, seed + 99)};
    const auto emb = wl_refine_categorical(ds, 4);
    for (Eigen::Index i = 0; i < emb[0].values.rows(); ++i) {
      for (Eigen::Index j = 0; j < emb[1].values.rows(); ++j) {
        bool differ = false;
        for (int h = 0; h <= 4; ++h) {
          const bool now = emb[0].values(i, h) != emb[1].values(j, h);
          if (differ) EXPECT_TRUE(now);
          differ = now;
        }
      }
    }
  }
}

TEST(Euclidean, Examples) {
  const auto a = as_embedding((RowMatrix(1, 2) << 0, 0).finished());
  const auto b = as_embedding((RowMatrix(1, 2) << 3, 4).finished());
  EXPECT_EQ(euclidean_matrix(a, b).values(0, 0), 5.0);
  EXPECT_EQ(euclidean_matrix(b, b).values(0, 0), 0.0);
}

TEST(Euclidean, IdenticalRowsAreExactlyZero) {
  std::mt19937_64 rng(4);
  const auto x = as_embedding(random_points(20, 7, rng) * 1e6);
  const RowMatrix d = euclidean_matrix(x, x).values;
  EXPECT_EQ(d.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(GroundDistance, SymmetryAndMetricAxioms) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = as_embedding(random_points(5, 3, rng));
    const auto y = as_embedding(random_points(4, 3, rng));
    const RowMatrix dxy = ground_distance(x, y, GroundKind::euclidean).values;
    const RowMatrix dyx = ground_distance(y, x, GroundKind::euclidean).values;
    EXPECT_LE((dxy - dyx.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(dxy(0, 0), (x.values.row(0) - y.values.row(0)).norm(), 1e-12);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dataset ds;
    ds.graphs = {random_labelled(8, 0.3, 3, seed)};
    const auto e = wl_refine_categorical(ds, 3)[0];
    const RowMatrix d = hamming_matrix(e, e).values;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (Eigen::Index j = 0; j < d.rows(); ++j) {
        EXPECT_EQ(d(i, j), d(j, i));
        for (Eigen::Index k = 0; k < d.rows(); ++k) EXPECT_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
      }
    }
  }
}
