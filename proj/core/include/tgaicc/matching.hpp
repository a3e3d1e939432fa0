#pragma once

#include <span>
#include <vector>

#include "tgaicc/matrix.hpp"

namespace tgaicc {

/// Maximum-weight one-to-one matching between rows and columns of `weights`.
///
/// Exactly min(rows, cols) pairs are matched. Among optimal matchings (sums
/// equal within `eps`) the one chosen gives the lowest column to the first
/// row in `row_priority`, then to the second, and so on; rows not listed in
/// `row_priority` follow in index order. Returns the column per row, or -1
/// for unmatched rows. Supports up to 20 columns.
std::vector<int> max_weight_matching(const Matrix& weights, std::span<const int> row_priority = {},
                                     double eps = 1e-12);

}  // namespace tgaicc
