#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "fixtures.hpp"
#include "tgaicc/error.hpp"
#include "tgaicc/kmeans.hpp"
#include "tgaicc/metrics.hpp"

using namespace tgaicc;

namespace {

Matrix random_points(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(n, d);
  for (auto& v : x.data()) v = rng.normal();
  return x;
}

}  // namespace

TEST(KMeans, KEqualsNGivesZeroInertia) {
  Rng rng(1);
  const auto x = random_points(rng, 7, 3);
  const auto r = kmeans(x, 7, 0);
  EXPECT_EQ(r.labeling.k(), 7);
  EXPECT_EQ(r.inertia, 0.0);
}

TEST(KMeans, SingleClusterInertiaIsTotalVariance) {
  Rng rng(2);
  const auto x = random_points(rng, 50, 4);
  const auto r = kmeans(x, 1, 3);
  double expected = 0.0;
  for (std::size_t d = 0; d < 4; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 50; ++i) mean += x(i, d);
    mean /= 50.0;
    for (std::size_t i = 0; i < 50; ++i) expected += (x(i, d) - mean) * (x(i, d) - mean);
  }
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(r.labeling[i], 0);
  EXPECT_NEAR(r.inertia, expected, 1e-9);
}

TEST(KMeans, RecoversTwoBlobs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto blobs = fixture::two_blobs(seed + 100, 50);
    EXPECT_EQ(ari(kmeans(blobs.points, 2, seed).labeling, Labeling(blobs.labels)).value, 1.0);
  }
}

TEST(KMeans, InertiaNonIncreasingAndConsistent) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto x = random_points(rng, 30 + rng.below(100), 1 + rng.below(5));
    const int k = 2 + static_cast<int>(rng.below(8));
    const auto r = kmeans(x, k, static_cast<std::uint64_t>(t));
    ASSERT_FALSE(r.inertia_history.empty());
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1]);
    }
    EXPECT_EQ(r.inertia, r.inertia_history.back());
    // Every cluster is non-empty and inertia matches the reported centers.
    EXPECT_EQ(r.labeling.k(), k);
    double inertia = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      inertia += squared_distance(x.row(i), r.centers.row(static_cast<std::size_t>(r.labeling[i])));
    }
    EXPECT_NEAR(inertia, r.inertia, 1e-9 * std::max(1.0, inertia));
  }
}

TEST(KMeans, DeterministicPerSeed) {
  Rng rng(4);
  const auto x = random_points(rng, 200, 3);
  const auto a = kmeans(x, 5, 42);
  const auto b = kmeans(x, 5, 42);
  EXPECT_EQ(a.labeling, b.labeling);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.inertia, b.inertia);
  EXPECT_EQ(a.seed, 42u);
}

TEST(KMeans, DuplicatePointsStillFillEveryCluster) {
  Matrix x(6, 1);
  x(5, 0) = 1.0;  // five identical rows, one distinct
  const auto r = kmeans(x, 4, 0);
  EXPECT_EQ(r.labeling.k(), 4);
}

TEST(KMeans, RejectsBadArguments) {
  Matrix x(3, 2);
  EXPECT_THROW(kmeans(x, 0, 0), Error);
  EXPECT_THROW(kmeans(x, 4, 0), Error);
  KMeansOptions opts;
  opts.max_iter = 0;
  EXPECT_THROW(kmeans(x, 2, 0, opts), Error);
  x(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(kmeans(x, 2, 0), Error);
}

TEST(KMeansPlusPlus, PicksDistinctRowsOfTheInput) {
  Rng rng(5);
  const auto x = random_points(rng, 40, 2);
  const auto c = kmeans_plus_plus(x, 6, 9);
  ASSERT_EQ(c.rows(), 6u);
  std::set<std::size_t> rows;
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (squared_distance(x.row(i), c.row(j)) == 0.0) rows.insert(i);
    }
  }
  EXPECT_EQ(rows.size(), 6u);
}
