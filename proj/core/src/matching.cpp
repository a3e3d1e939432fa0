#include "tgaicc/matching.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

#include "tgaicc/error.hpp"

namespace tgaicc {

std::vector<int> max_weight_matching(const Matrix& weights, std::span<const int> row_priority, double eps) {
  const std::size_t rows = weights.rows();
  const std::size_t cols = weights.cols();
  if (cols > 20) throw Error("matching supports at most 20 columns");
  std::vector<int> result(rows, -1);
  if (rows == 0 || cols == 0) return result;

  std::vector<std::size_t> order;
  std::vector<bool> listed(rows, false);
  for (int r : row_priority) {
    const auto ur = static_cast<std::size_t>(r);
    if (ur < rows && !listed[ur]) {
      order.push_back(ur);
      listed[ur] = true;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (!listed[r]) order.push_back(r);
  }

  const std::size_t target = std::min(rows, cols);
  const std::size_t masks = std::size_t{1} << cols;
  constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
  // value[pos][mask]: best total for rows order[pos..] given used columns.
  std::vector<double> value((rows + 1) * masks, kInfeasible);
  auto at = [&](std::size_t pos, std::size_t mask) -> double& { return value[pos * masks + mask]; };

  for (std::size_t mask = 0; mask < masks; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) == target) at(rows, mask) = 0.0;
  }
  for (std::size_t pos = rows; pos-- > 0;) {
    const std::size_t r = order[pos];
    for (std::size_t mask = 0; mask < masks; ++mask) {
      double best = at(pos + 1, mask);  // leave row unmatched
      for (std::size_t c = 0; c < cols; ++c) {
        if (mask & (std::size_t{1} << c)) continue;
        const double next = at(pos + 1, mask | (std::size_t{1} << c));
        if (next == kInfeasible) continue;
        best = std::max(best, weights(r, c) + next);
      }
      at(pos, mask) = best;
    }
  }

  std::size_t mask = 0;
  for (std::size_t pos = 0; pos < rows; ++pos) {
    const std::size_t r = order[pos];
    const double goal = at(pos, mask);
    bool placed = false;
    for (std::size_t c = 0; c < cols && !placed; ++c) {
      if (mask & (std::size_t{1} << c)) continue;
      const double next = at(pos + 1, mask | (std::size_t{1} << c));
      if (next == kInfeasible) continue;
      if (weights(r, c) + next >= goal - eps) {
        result[r] = static_cast<int>(c);
        mask |= std::size_t{1} << c;
        placed = true;
      }
    }
  }
  return result;
}

}  // namespace tgaicc
