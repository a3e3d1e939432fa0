#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tgaicc/core_model.hpp"
#include "tgaicc/grouping.hpp"
#include "tgaicc/matrix.hpp"

namespace tgaicc {

enum class ConsensusMethod { kCspa, kMcla, kHbgf, kNmf };

inline constexpr ConsensusMethod kConsensusMethods[] = {ConsensusMethod::kCspa, ConsensusMethod::kMcla,
                                                        ConsensusMethod::kHbgf, ConsensusMethod::kNmf};

std::string_view to_string(ConsensusMethod method);

// CSPA and NMF hold an n x n matrix and refuse larger inputs.
inline constexpr std::size_t kMaxCoassociationItems = 8192;

// S(x, y) = fraction of members that put x and y in the same cluster.
Matrix coassociation(const Ensemble& group);

// n x C binary matrix, one column per (member, cluster) in member order.
Matrix hypergraph_incidence(const Ensemble& group);

// k-means on the rows of the co-association matrix.
Labeling cspa(const Ensemble& group, int k, std::uint64_t seed);

/// Meta-clustering of hyperedges.
///
/// Hyperedges (clusters of all members) are compared by Jaccard similarity
/// and k-means on the rows of that C x C matrix forms k meta-clusters. An
/// item goes to the meta-cluster it participates in most (mean of the
/// meta-cluster's hyperedge indicators; lowest index on ties). An empty
/// meta-cluster j takes the item, from a cluster that keeps at least one
/// item, with the largest participation in j relative to its own.
Labeling mcla(const Ensemble& group, int k, std::uint64_t seed);

/// Bipartite spectral partitioning of the item/cluster graph.
///
/// With H the incidence matrix and D1, D2 its row and column degrees,
/// A = D1^-1/2 H D2^-1/2. The top k eigenvectors V of A^T A (C x C) give
/// item coordinates U = A V S^-1 (S the singular values), which are
/// row-normalized and clustered with k-means. Throws
/// Error("degenerate ensemble") if A has rank below k.
Labeling hbgf(const Ensemble& group, int k, std::uint64_t seed);

struct NmfOptions {
  int max_iter = 300;
  double rel_tol = 1e-6;
  double epsilon = 1e-9;
  bool seeded_start = true;
};

/// Symmetric NMF of the co-association matrix: min ||S - G G^T||^2 with
/// G >= 0 (n x k), using the damped multiplicative update
/// G <- G * (1/2 + 1/2 (S G) / (G G^T G + eps)), which never increases the
/// objective. Each start runs until max_iter or a relative objective change
/// below rel_tol.
///
/// The first start draws G uniform in (0, 1) from Rng(seed). With
/// `seeded_start`, a second start uses the columns of S at k-means++ rows of
/// S, and the start with the lower final objective wins (the uniform one on
/// ties). label(x) = argmax_j G(x, j), lowest j on ties. Empty clusters take
/// the item, from a cluster that keeps one, with the largest
/// G(x, j) - G(x, label(x)).
///
/// `objective_trace`, when given, receives ||S - G G^T||^2 of the winning
/// start for its initial G and after every update.
Labeling nmf_consensus(const Ensemble& group, int k, std::uint64_t seed, const NmfOptions& options = {},
                       std::vector<double>* objective_trace = nullptr);

Labeling run_consensus(ConsensusMethod method, const Ensemble& group, int k, std::uint64_t seed);

struct ConsensusCandidate {
  ConsensusMethod method = ConsensusMethod::kCspa;
  Labeling labeling;
  double anmi = 0.0;
  std::uint64_t seed = 0;
};

struct MethodFailure {
  ConsensusMethod method;
  std::string reason;
};

struct GroupConsensus {
  ConsensusCandidate selected;
  std::vector<ConsensusCandidate> candidates;  // successful methods, in method order
  std::vector<MethodFailure> failures;
};

// Runs CSPA, MCLA, HBGF and NMF and keeps the candidate with the highest
// ANMI against the group (ties go to the earlier method). Throws Error with
// every method's cause if all four fail.
GroupConsensus aggregate_group_detailed(const Ensemble& group, int k, std::uint64_t seed);
ConsensusCandidate aggregate_group(const Ensemble& group, int k, std::uint64_t seed);

struct TargetAssignment {
  std::vector<int> category;  // matched (or plurality) category per group
  std::vector<int> target_k;  // per group
  std::vector<std::vector<int>> votes;  // votes[group][category]
};

/// Chooses a target cluster count for every group.
///
/// Each member votes for its prompt's category. Groups and categories are
/// paired by a maximum-weight one-to-one matching on vote counts; on ties
/// larger groups choose first and prefer lower category indices. Groups left
/// over (only possible for approximate groupings) take their plurality
/// category. Throws Error if the group count differs from t and the
/// grouping is not flagged approximate.
TargetAssignment assign_targets(const GroupingResult& grouping, const PromptSpec& prompts,
                                const Ensemble& ensemble);

}  // namespace tgaicc
