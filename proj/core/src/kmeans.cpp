#include "tgaicc/kmeans.hpp"

#include <cmath>
#include <limits>

#include "tgaicc/error.hpp"
#include "tgaicc/rng.hpp"

namespace tgaicc {

namespace {

Matrix plus_plus_seeding(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n);
  std::vector<double> trial(n);
  std::vector<double> best_d2(n);
  const auto trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

  auto take = [&](std::size_t c, std::size_t row) {
    chosen[row] = true;
    std::copy(x.row(row).begin(), x.row(row).end(), centers.row(c).begin());
  };

  const auto first = static_cast<std::size_t>(rng.below(n));
  take(0, first);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), x.row(first));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;

    std::size_t pick = n;
    if (total > 0.0) {
      // Greedy: draw candidates by D^2 and keep the one that lowers the
      // potential most (first drawn on ties).
      double best_potential = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        std::size_t cand = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          cumulative += d2[i];
          cand = i;
          if (cumulative > target) break;
        }
        double potential = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          trial[i] = std::min(d2[i], squared_distance(x.row(i), x.row(cand)));
          potential += trial[i];
        }
        if (pick == n || potential < best_potential) {
          pick = cand;
          best_potential = potential;
          best_d2.swap(trial);
        }
      }
      d2.swap(best_d2);
    } else {
      const std::size_t remaining = n - c;
      auto skip = static_cast<std::size_t>(rng.below(remaining));
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        if (skip-- == 0) {
          pick = i;
          break;
        }
      }
    }
    take(c, pick);
  }
  return centers;
}

}  // namespace

Matrix kmeans_plus_plus(const Matrix& points, int k, std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > points.rows()) throw Error("k-means++: k must be in [1, n]");
  Rng rng(seed);
  return plus_plus_seeding(points, static_cast<std::size_t>(k), rng);
}

namespace {

// Nearest-center assignment (lowest center index on ties), then empty-cluster
// repair. Returns the inertia w.r.t. `centers`, which repair may update.
double assign(const Matrix& x, Matrix& centers, std::vector<int>& labels, std::vector<double>& dist) {
  const std::size_t n = x.rows();
  const std::size_t k = centers.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = squared_distance(x.row(i), centers.row(c));
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
    dist[i] = best;
    ++sizes[static_cast<std::size_t>(best_c)];
  }

  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[static_cast<std::size_t>(labels[i])] <= 1) continue;
      if (far == n || dist[i] > dist[far]) far = i;
    }
    --sizes[static_cast<std::size_t>(labels[far])];
    ++sizes[c];
    labels[far] = static_cast<int>(c);
    dist[far] = 0.0;
    std::copy(x.row(far).begin(), x.row(far).end(), centers.row(c).begin());
  }

  double inertia = 0.0;
  for (double d : dist) inertia += d;
  return inertia;
}

Matrix cluster_means(const Matrix& x, const std::vector<int>& labels, std::size_t k) {
  Matrix means(k, x.cols());
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    ++sizes[c];
    auto row = means.row(c);
    auto xi = x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += xi[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto& v : means.row(c)) v /= static_cast<double>(sizes[c]);
  }
  return means;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = points.rows();
  if (k < 1) throw Error("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw Error("kmeans: k = " + std::to_string(k) + " exceeds the number of points (" +
                std::to_string(n) + ")");
  }
  if (options.max_iter < 1) throw Error("kmeans: max_iter must be >= 1");
  for (double v : points.data()) {
    if (!std::isfinite(v)) throw Error("kmeans: non-finite input");
  }

  const auto kk = static_cast<std::size_t>(k);
  Rng rng(seed);
  Matrix centers = plus_plus_seeding(points, kk, rng);

  KMeansResult result;
  result.seed = seed;
  std::vector<int> labels(n, 0);
  std::vector<double> dist(n, 0.0);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.inertia_history.push_back(assign(points, centers, labels, dist));
    Matrix updated = cluster_means(points, labels, kk);
    double shift = 0.0;
    for (std::size_t i = 0; i < updated.data().size(); ++i) {
      const double d = updated.data()[i] - centers.data()[i];
      shift += d * d;
    }
    centers = std::move(updated);
    result.iterations = iter;
    if (shift < options.tol) break;
  }

  result.inertia = assign(points, centers, labels, dist);
  result.inertia_history.push_back(result.inertia);

  // Canonical labels; reorder centers to match.
  result.labeling = Labeling(labels);
  result.centers = Matrix(kk, points.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto to = static_cast<std::size_t>(result.labeling[i]);
    const auto from = static_cast<std::size_t>(labels[i]);
    std::copy(centers.row(from).begin(), centers.row(from).end(), result.centers.row(to).begin());
  }
  return result;
}

}  // namespace tgaicc
