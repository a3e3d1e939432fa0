#pragma once

#include <cstdint>
#include <vector>

#include "tgaicc/matrix.hpp"

namespace tgaicc {

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // size x k, column j pairs with values[j]
};

inline constexpr int kMaxPowerIterations = 10000;

/// The k algebraically largest eigenpairs of a symmetric matrix.
///
/// Power iteration with deflation: each new vector is kept orthogonal to the
/// accepted ones. When a Gershgorin bound shows negative eigenvalues may
/// exist the iteration runs on M + sI so that the dominant pair is the
/// algebraically largest one. A pair is accepted once
/// ||Mv - lambda v|| <= 1e-7 ||M||_F. Start vectors come from Rng(seed).
///
/// Throws Error if M is not square, not symmetric or not finite, if k is
/// out of range, or if a pair fails to converge in kMaxPowerIterations.
EigenPairs top_eigenvectors(const Matrix& m, int k, std::uint64_t seed = 0x5EED);

}  // namespace tgaicc
