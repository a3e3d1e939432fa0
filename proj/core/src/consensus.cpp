#include "tgaicc/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgaicc/error.hpp"
#include "tgaicc/kmeans.hpp"
#include "tgaicc/matching.hpp"
#include "tgaicc/metrics.hpp"
#include "tgaicc/rng.hpp"
#include "tgaicc/spectral.hpp"

namespace tgaicc {

namespace {

void require_target(int k) {
  if (k < 2) throw Error("consensus target k must be >= 2");
}

void require_coassociation_size(std::size_t n, std::string_view method) {
  if (n > kMaxCoassociationItems) {
    throw Error(std::string(method) + ": " + std::to_string(n) + " items exceed the limit of " +
                std::to_string(kMaxCoassociationItems) + " for an n x n matrix; use HBGF or MCLA");
  }
}

// Fills empty clusters in ascending order. Cluster j takes the item with the
// highest score(x, j) among items whose cluster keeps at least one member
// (lowest index on ties).
template <typename Score>
void repair_empty(std::vector<int>& labels, int k, Score score) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] != 0) continue;
    std::size_t best = labels.size();
    double best_score = 0.0;
    for (std::size_t x = 0; x < labels.size(); ++x) {
      if (sizes[static_cast<std::size_t>(labels[x])] <= 1) continue;
      const double s = score(x, j);
      if (best == labels.size() || s > best_score) {
        best = x;
        best_score = s;
      }
    }
    if (best == labels.size()) throw Error("cannot fill " + std::to_string(k) + " clusters");
    --sizes[static_cast<std::size_t>(labels[best])];
    ++sizes[static_cast<std::size_t>(j)];
    labels[best] = j;
  }
}

// Argmax per row, lowest column on ties.
std::vector<int> row_argmax(const Matrix& m) {
  std::vector<int> out(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

// Column offset of each member's first hyperedge; back() = C.
std::vector<std::size_t> hyperedge_offsets(const Ensemble& group) {
  std::vector<std::size_t> offsets{0};
  for (const auto& m : group.members()) offsets.push_back(offsets.back() + static_cast<std::size_t>(m.labeling.k()));
  return offsets;
}

}  // namespace

std::string_view to_string(ConsensusMethod method) {
  switch (method) {
    case ConsensusMethod::kCspa: return "CSPA";
    case ConsensusMethod::kMcla: return "MCLA";
    case ConsensusMethod::kHbgf: return "HBGF";
    case ConsensusMethod::kNmf: return "NMF";
  }
  return "?";
}

Matrix coassociation(const Ensemble& group) {
  if (group.size() == 0) throw Error("empty group");
  const std::size_t n = group.n();
  require_coassociation_size(n, "co-association");
  Matrix s(n, n);
  for (const auto& m : group.members()) {
    const auto& labels = m.labeling.labels();
    for (std::size_t x = 0; x < n; ++x) {
      auto row = s.row(x);
      for (std::size_t y = 0; y < n; ++y) {
        if (labels[x] == labels[y]) row[y] += 1.0;
      }
    }
  }
  const double r = static_cast<double>(group.size());
  for (auto& v : s.data()) v /= r;
  return s;
}

Matrix hypergraph_incidence(const Ensemble& group) {
  if (group.size() == 0) throw Error("empty group");
  const auto offsets = hyperedge_offsets(group);
  Matrix h(group.n(), offsets.back());
  for (std::size_t m = 0; m < group.size(); ++m) {
    const auto& labeling = group[m].labeling;
    for (std::size_t x = 0; x < labeling.size(); ++x) {
      h(x, offsets[m] + static_cast<std::size_t>(labeling[x])) = 1.0;
    }
  }
  return h;
}

Labeling cspa(const Ensemble& group, int k, std::uint64_t seed) {
  require_target(k);
  require_coassociation_size(group.n(), "CSPA");
  return kmeans(coassociation(group), k, seed).labeling;
}

Labeling mcla(const Ensemble& group, int k, std::uint64_t seed) {
  require_target(k);
  const Matrix h = hypergraph_incidence(group);
  const std::size_t n = h.rows();
  const std::size_t c = h.cols();

  std::vector<double> edge_size(c, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t e = 0; e < c; ++e) edge_size[e] += h(x, e);
  }
  // Pairwise intersections via member contingency tables would be cheaper,
  // but C is small and this keeps the construction obvious.
  Matrix jaccard(c, c);
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a; b < c; ++b) {
      double inter = 0.0;
      for (std::size_t x = 0; x < n; ++x) inter += h(x, a) * h(x, b);
      const double uni = edge_size[a] + edge_size[b] - inter;
      const double j = uni > 0.0 ? inter / uni : 0.0;
      jaccard(a, b) = j;
      jaccard(b, a) = j;
    }
  }

  const Labeling meta = kmeans(jaccard, k, seed).labeling;
  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> meta_size(kk, 0.0);
  for (std::size_t e = 0; e < c; ++e) meta_size[static_cast<std::size_t>(meta[e])] += 1.0;

  Matrix participation(n, kk);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t e = 0; e < c; ++e) {
      if (h(x, e) != 0.0) participation(x, static_cast<std::size_t>(meta[e])) += 1.0;
    }
    for (std::size_t j = 0; j < kk; ++j) participation(x, j) /= meta_size[j];
  }

  std::vector<int> labels = row_argmax(participation);
  repair_empty(labels, k, [&](std::size_t x, int j) {
    return participation(x, static_cast<std::size_t>(j)) - participation(x, static_cast<std::size_t>(labels[x]));
  });
  return Labeling(labels);
}

Labeling hbgf(const Ensemble& group, int k, std::uint64_t seed) {
  require_target(k);
  const auto offsets = hyperedge_offsets(group);
  const std::size_t c = offsets.back();
  const std::size_t n = group.n();
  const double r = static_cast<double>(group.size());
  if (static_cast<std::size_t>(k) > c) throw Error("degenerate ensemble: fewer hyperedges than k");

  // Column degrees are cluster sizes; every row degree equals r.
  std::vector<double> col_degree(c, 0.0);
  for (std::size_t m = 0; m < group.size(); ++m) {
    const auto sizes = group[m].labeling.cluster_sizes();
    for (std::size_t j = 0; j < sizes.size(); ++j) col_degree[offsets[m] + j] = static_cast<double>(sizes[j]);
  }

  // A^T A from member-pair contingency tables: |a & b| / (r sqrt(|a| |b|)).
  Matrix gram(c, c);
  for (std::size_t p = 0; p < group.size(); ++p) {
    for (std::size_t q = p; q < group.size(); ++q) {
      const auto table = contingency(group[p].labeling, group[q].labeling);
      for (std::size_t i = 0; i < table.rows; ++i) {
        for (std::size_t j = 0; j < table.cols; ++j) {
          const std::size_t a = offsets[p] + i;
          const std::size_t b = offsets[q] + j;
          const double v = static_cast<double>(table.at(i, j)) / (r * std::sqrt(col_degree[a] * col_degree[b]));
          gram(a, b) = v;
          gram(b, a) = v;
        }
      }
    }
  }

  const auto kk = static_cast<std::size_t>(k);
  const EigenPairs eig = top_eigenvectors(gram, k, seed);
  const double largest = std::max(eig.values.front(), 0.0);
  for (double lambda : eig.values) {
    if (!(lambda > 1e-10 * std::max(largest, 1.0))) {
      throw Error("degenerate ensemble: bipartite graph rank below k = " + std::to_string(k));
    }
  }

  // U = A V S^-1; row x of A has r non-zeros, one per member.
  Matrix u(n, kk);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t m = 0; m < group.size(); ++m) {
      const std::size_t e = offsets[m] + static_cast<std::size_t>(group[m].labeling[x]);
      const double a = 1.0 / std::sqrt(r * col_degree[e]);
      for (std::size_t j = 0; j < kk; ++j) u(x, j) += a * eig.vectors(e, j);
    }
    for (std::size_t j = 0; j < kk; ++j) u(x, j) /= std::sqrt(eig.values[j]);
  }
  for (std::size_t x = 0; x < n; ++x) {
    auto row = u.row(x);
    const double len = std::sqrt(dot(row, row));
    if (len > 0.0) {
      for (auto& v : row) v /= len;
    }
  }
  return kmeans(u, k, seed).labeling;
}

Labeling nmf_consensus(const Ensemble& group, int k, std::uint64_t seed, const NmfOptions& options,
                       std::vector<double>* objective_trace) {
  require_target(k);
  require_coassociation_size(group.n(), "NMF");
  const Matrix s = coassociation(group);
  const std::size_t n = s.rows();
  const auto kk = static_cast<std::size_t>(k);
  if (kk > n) throw Error("NMF: k exceeds the number of items");

  double s_norm2 = 0.0;
  for (double v : s.data()) s_norm2 += v * v;

  Matrix sg(n, kk);
  Matrix gtg(kk, kk);
  auto refresh = [&](const Matrix& g) {
    for (std::size_t x = 0; x < n; ++x) {
      auto out = sg.row(x);
      std::fill(out.begin(), out.end(), 0.0);
      auto srow = s.row(x);
      for (std::size_t y = 0; y < n; ++y) {
        const double sv = srow[y];
        if (sv == 0.0) continue;
        auto grow = g.row(y);
        for (std::size_t j = 0; j < kk; ++j) out[j] += sv * grow[j];
      }
    }
    for (std::size_t a = 0; a < kk; ++a) {
      for (std::size_t b = 0; b < kk; ++b) {
        double sum = 0.0;
        for (std::size_t x = 0; x < n; ++x) sum += g(x, a) * g(x, b);
        gtg(a, b) = sum;
      }
    }
  };
  // ||S - G G^T||^2 = ||S||^2 - 2 tr(G^T S G) + ||G^T G||^2
  auto objective = [&](const Matrix& g) {
    double trace = 0.0;
    for (std::size_t i = 0; i < g.data().size(); ++i) trace += g.data()[i] * sg.data()[i];
    double gram2 = 0.0;
    for (double v : gtg.data()) gram2 += v * v;
    return std::max(0.0, s_norm2 - 2.0 * trace + gram2);
  };

  auto solve = [&](Matrix& g, std::vector<double>& trace) {
    refresh(g);
    double previous = objective(g);
    trace.assign(1, previous);
    std::vector<double> denom(kk);
    for (int iter = 0; iter < options.max_iter; ++iter) {
      for (std::size_t x = 0; x < n; ++x) {
        auto grow = g.row(x);
        // (G G^T G)(x, j) = (G (G^T G))(x, j)
        std::fill(denom.begin(), denom.end(), 0.0);
        for (std::size_t j = 0; j < kk; ++j) {
          for (std::size_t a = 0; a < kk; ++a) denom[j] += grow[a] * gtg(a, j);
        }
        for (std::size_t j = 0; j < kk; ++j) grow[j] *= 0.5 + 0.5 * sg(x, j) / (denom[j] + options.epsilon);
      }
      refresh(g);
      const double current = objective(g);
      trace.push_back(current);
      const double change = std::abs(previous - current) / std::max(previous, 1e-300);
      previous = current;
      if (change < options.rel_tol) break;
    }
    return previous;
  };

  // Start 1: uniform in (0, 1).
  Rng rng(seed);
  Matrix g(n, kk);
  for (auto& v : g.data()) v = rng.uniform_open();
  std::vector<double> trace;
  const double uniform_obj = solve(g, trace);

  // Start 2: columns of S at k-means++ rows, plus a uniform floor so no
  // entry starts at zero.
  if (options.seeded_start) {
    const Matrix centers = kmeans_plus_plus(s, k, mix_seed(seed, 1));
    Rng floor_rng(mix_seed(seed, 2));
    Matrix g2(n, kk);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t j = 0; j < kk; ++j) g2(x, j) = centers(j, x) + 0.1 * floor_rng.uniform_open();
    }
    std::vector<double> trace2;
    if (solve(g2, trace2) < uniform_obj) {
      g = std::move(g2);
      trace = std::move(trace2);
    }
  }
  if (objective_trace) *objective_trace = std::move(trace);

  std::vector<int> labels = row_argmax(g);
  repair_empty(labels, k, [&](std::size_t x, int j) {
    return g(x, static_cast<std::size_t>(j)) - g(x, static_cast<std::size_t>(labels[x]));
  });
  return Labeling(labels);
}

Labeling run_consensus(ConsensusMethod method, const Ensemble& group, int k, std::uint64_t seed) {
  switch (method) {
    case ConsensusMethod::kCspa: return cspa(group, k, seed);
    case ConsensusMethod::kMcla: return mcla(group, k, seed);
    case ConsensusMethod::kHbgf: return hbgf(group, k, seed);
    case ConsensusMethod::kNmf: return nmf_consensus(group, k, seed);
  }
  throw Error("unknown consensus method");
}

GroupConsensus aggregate_group_detailed(const Ensemble& group, int k, std::uint64_t seed) {
  if (group.size() == 0) throw Error("empty group");
  GroupConsensus out;
  for (ConsensusMethod method : kConsensusMethods) {
    try {
      Labeling labeling = run_consensus(method, group, k, seed);
      const double score = anmi(labeling, group);
      out.candidates.push_back({method, std::move(labeling), score, seed});
    } catch (const std::exception& e) {
      out.failures.push_back({method, e.what()});
    }
  }
  if (out.candidates.empty()) {
    std::string causes;
    for (const auto& f : out.failures) causes += "\n  " + std::string(to_string(f.method)) + ": " + f.reason;
    throw Error("every consensus method failed:" + causes);
  }
  const ConsensusCandidate* best = &out.candidates.front();
  for (const auto& c : out.candidates) {
    if (c.anmi > best->anmi) best = &c;
  }
  out.selected = *best;
  return out;
}

ConsensusCandidate aggregate_group(const Ensemble& group, int k, std::uint64_t seed) {
  return aggregate_group_detailed(group, k, seed).selected;
}

TargetAssignment assign_targets(const GroupingResult& grouping, const PromptSpec& prompts,
                                const Ensemble& ensemble) {
  const std::size_t groups = grouping.groups.size();
  const std::size_t t = prompts.t();
  if (groups != t && !grouping.approximate) {
    throw Error("grouping has " + std::to_string(groups) + " groups but " + std::to_string(t) +
                " categories, and is not flagged approximate");
  }

  TargetAssignment out;
  out.votes.assign(groups, std::vector<int>(t, 0));
  Matrix weights(groups, t);
  for (std::size_t g = 0; g < groups; ++g) {
    for (int member : grouping.groups[g]) {
      const auto c = prompts.category_of_prompt(ensemble[static_cast<std::size_t>(member)].prompt_id);
      ++out.votes[g][c];
      weights(g, c) += 1.0;
    }
  }

  std::vector<int> priority(groups);
  std::iota(priority.begin(), priority.end(), 0);
  std::stable_sort(priority.begin(), priority.end(), [&](int a, int b) {
    return grouping.groups[static_cast<std::size_t>(a)].size() > grouping.groups[static_cast<std::size_t>(b)].size();
  });
  out.category = max_weight_matching(weights, priority, 0.5);

  const auto ks = prompts.target_ks();
  out.target_k.assign(groups, 0);
  for (std::size_t g = 0; g < groups; ++g) {
    if (out.category[g] < 0) {
      const auto& v = out.votes[g];
      out.category[g] = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    }
    out.target_k[g] = ks[static_cast<std::size_t>(out.category[g])];
  }
  return out;
}

}  // namespace tgaicc
