#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tgaicc/core_model.hpp"

namespace tgaicc {

struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> counts;  // row-major rows x cols
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t n = 0;

  std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

struct MetricScore {
  double value = 0.0;

  // Reported scores are multiplied by 100.
  double scaled() const { return 100.0 * value; }
};

ContingencyTable contingency(const Labeling& a, const Labeling& b);

// Adjusted Rand index (Hubert & Arabie). The pair-count sums are exact
// 128-bit integers; a single division produces the result.
MetricScore ari(const Labeling& a, const Labeling& b);

// Mutual information in nats.
double mutual_information(const ContingencyTable& table);
double entropy(std::span<const std::int64_t> sizes, std::int64_t n);

// E[MI] under the hypergeometric (permutation) model with the table's
// marginals fixed.
double expected_mutual_information(const ContingencyTable& table);

/// Adjusted mutual information with arithmetic-mean normalization:
///
///   AMI = (MI - E[MI]) / ((H(a) + H(b)) / 2 - E[MI])
///
/// If both labelings are a single cluster, or both are all singletons, the
/// result is 1. Any other zero denominator gives 0.
MetricScore ami(const Labeling& a, const Labeling& b);

// Average AMI between `candidate` and every ensemble member.
double anmi(const Labeling& candidate, const Ensemble& ensemble);

}  // namespace tgaicc
