#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tgaicc/error.hpp"
#include "tgaicc/matching.hpp"
#include "tgaicc/rng.hpp"
#include "tgaicc/spectral.hpp"

using namespace tgaicc;

namespace {

// Best total weight over all injective maps of the smaller side.
double brute_force_best(const Matrix& w) {
  const bool transpose = w.rows() > w.cols();
  const std::size_t small = std::min(w.rows(), w.cols());
  const std::size_t large = std::max(w.rows(), w.cols());
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) total += transpose ? w(perm[i], i) : w(i, perm[i]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Matching, OptimalOnRandomMatrices) {
  Rng rng(1);
  for (int t = 0; t < 60; ++t) {
    const std::size_t r = 1 + rng.below(5);
    const std::size_t c = 1 + rng.below(5);
    Matrix w(r, c);
    for (auto& v : w.data()) v = rng.uniform();
    const auto match = max_weight_matching(w);
    ASSERT_EQ(match.size(), r);
    double total = 0.0;
    std::set<int> used;
    std::size_t matched = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (match[i] < 0) continue;
      ++matched;
      EXPECT_TRUE(used.insert(match[i]).second);
      total += w(i, static_cast<std::size_t>(match[i]));
    }
    EXPECT_EQ(matched, std::min(r, c));
    EXPECT_NEAR(total, brute_force_best(w), 1e-12);
  }
}

TEST(Matching, TiesPreferLowerColumnsForEarlierRows) {
  Matrix w(2, 2, 1.0);
  EXPECT_EQ(max_weight_matching(w), (std::vector<int>{0, 1}));
  const std::vector<int> priority{1, 0};
  EXPECT_EQ(max_weight_matching(w, priority), (std::vector<int>{1, 0}));
}

TEST(Spectral, DiagonalMatrix) {
  Matrix m(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 5;
  m(2, 2) = 3;
  m(3, 3) = 0.5;
  const auto e = top_eigenvectors(m, 2);
  ASSERT_EQ(e.values.size(), 2u);
  EXPECT_NEAR(e.values[0], 5.0, 1e-9);
  EXPECT_NEAR(e.values[1], 3.0, 1e-9);
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-7);
  EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-7);
}

TEST(Spectral, ResidualAndOrthonormality) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3 + rng.below(20);
    // Gram matrix: symmetric positive semidefinite.
    Matrix a(n, n);
    for (auto& v : a.data()) v = rng.normal();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = dot(a.row(i), a.row(j));
    double fro = 0.0;
    for (double v : m.data()) fro += v * v;
    fro = std::sqrt(fro);
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 4));
    const auto e = top_eigenvectors(m, static_cast<int>(k), 7);
    for (std::size_t p = 0; p < k; ++p) {
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double mv = 0.0;
        for (std::size_t j = 0; j < n; ++j) mv += m(i, j) * e.vectors(j, p);
        res += (mv - e.values[p] * e.vectors(i, p)) * (mv - e.values[p] * e.vectors(i, p));
      }
      EXPECT_LE(std::sqrt(res), 1e-7 * fro);
      for (std::size_t q = 0; q <= p; ++q) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += e.vectors(i, p) * e.vectors(i, q);
        EXPECT_NEAR(d, p == q ? 1.0 : 0.0, 1e-6);
      }
      if (p > 0) EXPECT_GE(e.values[p - 1], e.values[p] - 1e-9 * fro);
    }
  }
}

TEST(Spectral, RejectsBadInput) {
  Matrix m(2, 3);
  EXPECT_THROW(top_eigenvectors(m, 1), Error);
  Matrix sq(2, 2, 1.0);
  EXPECT_THROW(top_eigenvectors(sq, 3), Error);
}
