#pragma once

#include <cstdint>
#include <vector>

#include "tgaicc/core_model.hpp"
#include "tgaicc/featurize.hpp"
#include "tgaicc/matrix.hpp"

namespace tgaicc {

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-4;  // stop when the squared Frobenius center shift drops below
};

struct KMeansResult {
  Labeling labeling;     // canonical
  Matrix centers;        // k x d, row c is the center of cluster c
  double inertia = 0.0;  // sum of squared distances to assigned centers
  int iterations = 0;
  std::uint64_t seed = 0;
  // Inertia after each assignment step, ending with the final assignment.
  std::vector<double> inertia_history;
};

/// One k-means++ initialization followed by Lloyd iteration.
///
/// Seeding draws from Rng(seed): the first center uniformly; for each
/// further center 2 + floor(ln k) candidates are drawn with probability
/// proportional to squared distance to the nearest chosen center, and the
/// one giving the lowest total squared distance is kept (earliest draw on
/// ties). When all distances are 0 the center is uniform among unchosen rows.
/// After every assignment step an empty cluster takes the point farthest
/// from its current center (lowest row index on ties), drawn only from
/// clusters that keep at least one point, so all k clusters are non-empty.
///
/// Throws Error when k < 1, k > n or the input holds non-finite values.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

// The k-means++ seeding step alone: k rows of `points`, drawn as above.
Matrix kmeans_plus_plus(const Matrix& points, int k, std::uint64_t seed);

inline KMeansResult kmeans(const FeatureMatrix& m, int k, std::uint64_t seed,
                           const KMeansOptions& options = {}) {
  return kmeans(m.data, k, seed, options);
}

}  // namespace tgaicc
