#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "lp_oracle.hpp"
#include "test_util.hpp"

using namespace wwl;
using namespace wwl::testing;

namespace {

RowMatrix line_cost(std::vector<double> x, std::vector<double> y) {
  RowMatrix m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = std::abs(x[i] - y[j]);
  }
  return m;
}

void expect_feasible(const RowMatrix& p, double tol) {
  const double n = static_cast<double>(p.rows()), k = static_cast<double>(p.cols());
  EXPECT_GE(p.minCoeff(), -tol);
  for (Eigen::Index i = 0; i < p.rows(); ++i) EXPECT_NEAR(p.row(i).sum(), 1.0 / n, tol);
  for (Eigen::Index j = 0; j < p.cols(); ++j) EXPECT_NEAR(p.col(j).sum(), 1.0 / k, tol);
}

}  // namespace

TEST(LpOracle, SelfCheckAgainstPermutations) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    const RowMatrix m = random_cost(4, 4, rng);
    std::vector<int> perm{0, 1, 2, 3};
    double best = 1e300;
    do {
      double s = 0;
      for (int i = 0; i < 4; ++i) s += m(i, perm[i]);
      best = std::min(best, s / 4);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(transport_lp(m), best, 1e-12);
  }
}

TEST(Exact, IdenticalSets) {
  std::mt19937_64 rng(2);
  const RowMatrix x = random_points(6, 2, rng);
  const auto r = wasserstein_exact(pairwise_euclidean(x, x));
  EXPECT_EQ(r.distance, 0.0);
  ASSERT_TRUE(r.plan);
  EXPECT_LE((r.plan->values - RowMatrix::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Exact, LineExample) {
  const auto r = wasserstein_exact(line_cost({0, 1}, {0, 3}));
  EXPECT_NEAR(r.distance, 1.0, 1e-15);
  EXPECT_NEAR(r.plan->values(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.plan->values(1, 1), 0.5, 1e-15);
}

TEST(Exact, RectangularExample) {
  const auto r = wasserstein_exact(line_cost({0, 2}, {1}));
  EXPECT_NEAR(r.distance, 1.0, 1e-15);
  EXPECT_NEAR(r.plan->values(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.plan->values(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(transport_lp(line_cost({0, 2}, {1})), 1.0, 1e-12);
}

TEST(Exact, RejectsBadCost) {
  EXPECT_THROW(wasserstein_exact(RowMatrix(0, 3)), Error);
  EXPECT_THROW(wasserstein_exact((RowMatrix(1, 2) << 1, -1).finished()), Error);
  EXPECT_THROW(wasserstein_exact((RowMatrix(1, 1) << std::nan("")).finished()), Error);
}

TEST(Exact, MatchesLpOracleOnRandomRectangles) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(1, 9);
  for (int t = 0; t < 200; ++t) {
    const int n = size(rng), k = size(rng);
    RowMatrix m = random_cost(n, k, rng);
    if (t % 3 == 0) m = m.unaryExpr([](double v) { return std::floor(v * 4); });  // heavy ties
    const auto r = wasserstein_exact(m);
    EXPECT_NEAR(r.distance, transport_lp(m), 1e-9) << n << "x" << k;
    expect_feasible(r.plan->values, 1e-12);
    EXPECT_NEAR(frobenius(r.plan->values, m), r.distance, 1e-12);
    const auto positives = (r.plan->values.array() > 0.0).count();
    EXPECT_LE(positives, n + k - 1);
  }
}

TEST(Exact, LargeInstanceFeasible) {
  std::mt19937_64 rng(5);
  const RowMatrix x = random_points(150, 4, rng), y = random_points(120, 4, rng);
  const auto r = wasserstein_exact(pairwise_euclidean(x, y));
  expect_feasible(r.plan->values, 1e-12);
  EXPECT_LT(r.distance, pairwise_euclidean(x, y).mean());
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(wasserstein_bruteforce((RowMatrix(1, 1) << 2.5).finished()).distance, 2.5);
  EXPECT_NEAR(wasserstein_bruteforce(line_cost({0, 1}, {0, 3})).distance, 1.0, 1e-15);
  EXPECT_THROW(wasserstein_bruteforce(RowMatrix::Zero(4, 5)), Error);
}

TEST(BruteForce, MatchesExactOnRandomSquares) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const RowMatrix m = random_cost(5, 5, rng);
    EXPECT_NEAR(wasserstein_bruteforce(m).distance, wasserstein_exact(m).distance, 1e-9);
  }
}

TEST(BruteForce, VertexEnumerationMatchesLp) {
  std::mt19937_64 rng(3);
  const std::vector<std::pair<int, int>> shapes{{2, 3}, {3, 2}, {2, 5}, {3, 4}, {4, 3}, {1, 7}, {2, 6}};
  for (int t = 0; t < 70; ++t) {
    const auto [n, k] = shapes[t % shapes.size()];
    const RowMatrix m = random_cost(n, k, rng);
    EXPECT_NEAR(wasserstein_bruteforce(m).distance, transport_lp(m), 1e-9);
  }
}

TEST(Sinkhorn, IdenticalSetsVanish) {
  std::mt19937_64 rng(7);
  const RowMatrix x = random_points(8, 2, rng);
  const RowMatrix m = pairwise_euclidean(x, x);
  const auto r = wasserstein_sinkhorn(m, 0.01 * m.maxCoeff());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.distance, 0.05 * m.maxCoeff());
}

TEST(Sinkhorn, LargeGammaGivesIndependentPlan) {
  std::mt19937_64 rng(7);
  const RowMatrix m = random_cost(5, 3, rng);
  const auto r = wasserstein_sinkhorn(m, 1e6);
  EXPECT_NEAR(r.distance, m.mean(), 1e-5);
  EXPECT_LE((r.plan->values.array() - 1.0 / 15.0).abs().maxCoeff(), 1e-6);
}

TEST(Sinkhorn, ContractOnRandomInstances) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const RowMatrix m = pairwise_euclidean(random_points(10, 2, rng), random_points(10, 2, rng));
    const double exact = wasserstein_exact(m).distance;
    double prev = std::numeric_limits<double>::infinity();
    for (double f : {0.5, 0.1, 0.02}) {
      const auto r = wasserstein_sinkhorn(m, f * m.mean());
      if (f == 0.5) {
        EXPECT_TRUE(r.converged);
        EXPECT_LE(r.marginal_violation, 1e-9);
      }
      EXPECT_GE(r.distance, exact - 1e-9);
      EXPECT_LE(r.distance, prev + 1e-12);
      prev = r.distance;
    }
  }
}

TEST(Sinkhorn, LogDomainOnUnderflow) {
  std::mt19937_64 rng(21);
  RowMatrix m = random_cost(6, 5, rng);
  m(0, 0) = m(3, 4) = 5000.0;
  const auto r = wasserstein_sinkhorn(m, 0.5);
  EXPECT_NE(r.status.find("log domain"), std::string::npos);
  EXPECT_TRUE(std::isfinite(r.distance));
  EXPECT_TRUE(r.converged);
  expect_feasible(r.plan->values, 1e-9);
  EXPECT_GE(r.distance, wasserstein_exact(m).distance - 1e-9);
}

TEST(Sinkhorn, NonConvergenceIsReported) {
  std::mt19937_64 rng(1);
  const RowMatrix m = random_cost(10, 10, rng);
  SinkhornOptions opt;
  opt.max_iter = 2;
  opt.tol = 1e-15;
  const auto r = wasserstein_sinkhorn(m, 0.01, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_NE(r.status.find("max_iter"), std::string::npos);
}

TEST(Sinkhorn, RejectsNonPositiveGamma) {
  EXPECT_THROW(wasserstein_sinkhorn(RowMatrix::Ones(2, 2), 0.0), Error);
}
