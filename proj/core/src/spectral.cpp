#include "tgaicc/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "tgaicc/error.hpp"
#include "tgaicc/rng.hpp"

namespace tgaicc {

namespace {

void multiply(const Matrix& m, std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// Removes the components of v along the first `count` columns of basis.
void orthogonalize(std::span<double> v, const Matrix& basis, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count; ++j) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * basis(i, j);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * basis(i, j);
    }
  }
}

}  // namespace

EigenPairs top_eigenvectors(const Matrix& m, int k, std::uint64_t seed) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error("top_eigenvectors: matrix is not square");
  if (k < 1 || static_cast<std::size_t>(k) > n) throw Error("top_eigenvectors: k out of range");

  double frob = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v)) throw Error("top_eigenvectors: non-finite entry");
      if (std::abs(v - m(j, i)) > 1e-12 * (1.0 + std::abs(v))) {
        throw Error("top_eigenvectors: matrix is not symmetric");
      }
      frob += v * v;
      if (j != i) off += std::abs(v);
    }
    shift = std::max(shift, off - m(i, i));  // -(Gershgorin lower bound)
  }
  frob = std::sqrt(frob);
  const double tol = 1e-7 * frob;

  const auto kk = static_cast<std::size_t>(k);
  EigenPairs out;
  out.vectors = Matrix(n, kk);
  std::vector<double> v(n), mv(n), w(n);

  for (std::size_t j = 0; j < kk; ++j) {
    Rng rng(mix_seed(seed, j));
    for (auto& x : v) x = rng.normal();
    orthogonalize(v, out.vectors, j);
    double len = norm(v);
    if (len < 1e-12) {
      // Start vector fell in the accepted span; fall back to unit vectors.
      for (std::size_t e = 0; e < n && len < 1e-12; ++e) {
        std::fill(v.begin(), v.end(), 0.0);
        v[e] = 1.0;
        orthogonalize(v, out.vectors, j);
        len = norm(v);
      }
    }
    for (auto& x : v) x /= len;

    bool converged = false;
    double lambda = 0.0;
    for (int iter = 0; iter < kMaxPowerIterations; ++iter) {
      multiply(m, v, mv);
      lambda = dot(v, mv);
      double residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = mv[i] - lambda * v[i];
        residual += r * r;
      }
      if (std::sqrt(residual) <= tol) {
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) w[i] = mv[i] + shift * v[i];
      orthogonalize(w, out.vectors, j);
      const double wl = norm(w);
      if (wl == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wl;
    }
    if (!converged) {
      throw Error("top_eigenvectors: power iteration did not converge for pair " + std::to_string(j));
    }
    out.values.push_back(lambda);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v[i];
  }
  return out;
}

}  // namespace tgaicc
