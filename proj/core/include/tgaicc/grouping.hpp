#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "tgaicc/core_model.hpp"

namespace tgaicc {

// Condensed symmetric distance matrix over m clusterings; d(i, i) = 0.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t m) : m_(m), d_(m * (m > 0 ? m - 1 : 0) / 2, 0.0) {}

  std::size_t size() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);
  const std::vector<double>& condensed() const { return d_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t m_ = 0;
  std::vector<double> d_;
};

// d(i, j) = 1 - AMI(member i, member j). Throws Error for fewer than 2
// members. Distances exceed 1 when AMI is negative.
DistanceMatrix pairwise_distances(const Ensemble& ensemble);

// One agglomeration step. Leaves are 0..m-1; merge i creates node m + i.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct LinkageTree {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // m - 1 entries, distances non-decreasing
};

// Single linkage via a minimum spanning tree (Prim, O(m^2)); merges are the
// MST edges in non-decreasing weight order.
LinkageTree single_linkage(const DistanceMatrix& d);

// Group id per clustering for the cut at `tau`: two clusterings share a
// group iff their cophenetic distance is <= tau. Ids are canonical.
std::vector<int> flat_cut(const LinkageTree& tree, double tau);

std::size_t group_count(const LinkageTree& tree, double tau);

enum class Strategy { kMin, kMax };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

// {0.02, 0.04, ..., 0.98}: 49 values, each computed as i / 50.
std::vector<double> threshold_grid();

struct GroupingResult {
  double threshold = 0.0;
  std::vector<int> assignment;            // group id per clustering
  std::vector<std::vector<int>> groups;   // clustering indices per group
  Strategy strategy = Strategy::kMax;
  bool approximate = false;               // no grid value gives exactly t groups
};

/// Grid search for a threshold that yields exactly t groups.
///
/// kMin returns the smallest such grid value and kMax the largest. When no
/// grid value hits t, the value minimizing |groups - t| is used (smallest
/// for kMin, largest for kMax) and `approximate` is set.
GroupingResult threshold_search(const LinkageTree& tree, int t, Strategy strategy);

}  // namespace tgaicc
