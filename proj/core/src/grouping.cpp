#include "tgaicc/grouping.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "tgaicc/error.hpp"
#include "tgaicc/metrics.hpp"

namespace tgaicc {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

}  // namespace

std::size_t DistanceMatrix::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle without the diagonal, as in scipy's pdist.
  return m_ * i - i * (i + 1) / 2 + (j - i - 1);
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return d_[index(i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i == j) throw Error("cannot set a diagonal distance");
  d_[index(i, j)] = value;
}

DistanceMatrix pairwise_distances(const Ensemble& ensemble) {
  const std::size_t m = ensemble.size();
  if (m < 2) throw Error("pairwise distances need at least 2 clusterings");
  DistanceMatrix d(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      d.set(i, j, 1.0 - ami(ensemble[i].labeling, ensemble[j].labeling).value);
    }
  }
  return d;
}

LinkageTree single_linkage(const DistanceMatrix& d) {
  const std::size_t m = d.size();
  LinkageTree tree;
  tree.leaves = m;
  if (m < 2) return tree;

  struct Edge {
    std::size_t u, v;
    double w;
  };
  std::vector<Edge> edges;
  std::vector<bool> in_tree(m, false);
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(m, 0);
  in_tree[0] = true;
  for (std::size_t v = 1; v < m; ++v) best[v] = d(0, v);
  for (std::size_t step = 1; step < m; ++step) {
    std::size_t next = m;
    for (std::size_t v = 0; v < m; ++v) {
      if (!in_tree[v] && (next == m || best[v] < best[next])) next = v;
    }
    edges.push_back({from[next], next, best[next]});
    in_tree[next] = true;
    for (std::size_t v = 0; v < m; ++v) {
      if (in_tree[v]) continue;
      const double w = d(next, v);
      if (w < best[v]) {
        best[v] = w;
        from[v] = next;
      }
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });

  // Kruskal replay over the MST edges to label merged nodes.
  DisjointSets sets(m);
  std::vector<std::size_t> node_of(m);
  std::vector<std::size_t> size_of(m, 1);
  std::iota(node_of.begin(), node_of.end(), 0);
  for (const auto& e : edges) {
    const std::size_t ru = sets.find(e.u);
    const std::size_t rv = sets.find(e.v);
    std::size_t left = node_of[ru];
    std::size_t right = node_of[rv];
    if (right < left) std::swap(left, right);
    const std::size_t size = size_of[ru] + size_of[rv];
    sets.unite(ru, rv);
    const std::size_t root = sets.find(ru);
    node_of[root] = m + tree.merges.size();
    size_of[root] = size;
    tree.merges.push_back({left, right, e.w, size});
  }
  return tree;
}

std::vector<int> flat_cut(const LinkageTree& tree, double tau) {
  const std::size_t m = tree.leaves;
  DisjointSets sets(m);
  // Node id -> any leaf it contains.
  std::vector<std::size_t> leaf_of(m + tree.merges.size());
  std::iota(leaf_of.begin(), leaf_of.begin() + static_cast<std::ptrdiff_t>(m), 0);
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const auto& mg = tree.merges[i];
    leaf_of[m + i] = leaf_of[mg.left];
    if (mg.distance <= tau) sets.unite(leaf_of[mg.left], leaf_of[mg.right]);
  }
  std::vector<int> roots(m);
  for (std::size_t i = 0; i < m; ++i) roots[i] = static_cast<int>(sets.find(i));
  if (m == 0) return {};
  return canonicalize(roots);
}

std::size_t group_count(const LinkageTree& tree, double tau) {
  std::size_t count = tree.leaves;
  for (const auto& mg : tree.merges) {
    if (mg.distance <= tau) --count;
  }
  return count;
}

std::string_view to_string(Strategy s) { return s == Strategy::kMin ? "min" : "max"; }

Strategy parse_strategy(std::string_view text) {
  if (text == "min") return Strategy::kMin;
  if (text == "max") return Strategy::kMax;
  throw Error("unknown strategy '" + std::string(text) + "' (expected min|max)");
}

std::vector<double> threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 49; ++i) grid.push_back(static_cast<double>(i) / 50.0);
  return grid;
}

GroupingResult threshold_search(const LinkageTree& tree, int t, Strategy strategy) {
  if (t < 1) throw Error("threshold search needs t >= 1");
  const auto grid = threshold_grid();

  std::size_t chosen = grid.size();
  long best_gap = std::numeric_limits<long>::max();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const long gap = std::labs(static_cast<long>(group_count(tree, grid[g])) - t);
    // kMin keeps the first grid value reaching the best gap, kMax the last.
    if (gap < best_gap || (gap == best_gap && strategy == Strategy::kMax)) {
      best_gap = gap;
      chosen = g;
    }
  }

  GroupingResult result;
  result.strategy = strategy;
  result.threshold = grid[chosen];
  result.approximate = best_gap != 0;
  result.assignment = flat_cut(tree, result.threshold);
  int groups = 0;
  for (int id : result.assignment) groups = std::max(groups, id + 1);
  result.groups.resize(static_cast<std::size_t>(groups));
  for (std::size_t i = 0; i < result.assignment.size(); ++i) {
    result.groups[static_cast<std::size_t>(result.assignment[i])].push_back(static_cast<int>(i));
  }
  return result;
}

}  // namespace tgaicc
