#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tgaicc/consensus.hpp"
#include "tgaicc/error.hpp"
#include "tgaicc/metrics.hpp"

using namespace tgaicc;

namespace {

double frobenius2(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return s;
}

}  // namespace

TEST(Coassociation, FractionOfAgreeingMembers) {
  const auto e = Ensemble::of({Labeling{0, 0, 1, 1}, Labeling{0, 1, 1, 1}});
  const auto s = coassociation(e);
  EXPECT_EQ(s(0, 0), 1.0);
  EXPECT_EQ(s(0, 1), 0.5);
  EXPECT_EQ(s(2, 3), 1.0);
  EXPECT_EQ(s(0, 3), 0.0);
  EXPECT_EQ(s(1, 2), 0.5);
  EXPECT_EQ(s(1, 2), s(2, 1));
}

TEST(HypergraphIncidence, OneColumnPerCluster) {
  const auto e = Ensemble::of({Labeling{0, 0, 1}, Labeling{0, 1, 2}});
  const auto h = hypergraph_incidence(e);
  ASSERT_EQ(h.rows(), 3u);
  ASSERT_EQ(h.cols(), 5u);
  for (std::size_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (std::size_t c = 0; c < 5; ++c) row += h(i, c);
    EXPECT_EQ(row, 2.0);
  }
  EXPECT_EQ(h(2, 1), 1.0);
  EXPECT_EQ(h(1, 3), 1.0);
}

TEST(Consensus, SingleMemberIsReproduced) {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Labeling truth(fixture::random_partition(rng, 60, 3));
    const auto e = Ensemble::of({truth});
    for (auto method : kConsensusMethods) {
      EXPECT_EQ(ari(run_consensus(method, e, 3, static_cast<std::uint64_t>(t)), truth).value, 1.0)
          << to_string(method);
    }
  }
}

TEST(Consensus, NoisyCopiesRecoverTruth) {
  Rng rng(2);
  const Labeling truth(fixture::random_partition(rng, 90, 3));
  std::vector<Labeling> members;
  for (int m = 0; m < 7; ++m) {
    auto labels = truth.labels();
    for (auto& l : labels)
      if (rng.uniform() < 0.1) l = static_cast<int>(rng.below(3));
    members.emplace_back(labels);
  }
  const auto e = Ensemble::of(members);
  for (auto method : kConsensusMethods) {
    const auto out = run_consensus(method, e, 3, 5);
    EXPECT_EQ(out.k(), 3) << to_string(method);
    EXPECT_GT(ari(out, truth).value, 0.9) << to_string(method);
  }
}

TEST(Consensus, OutputAlwaysHasKClusters) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Labeling> members;
    for (int m = 0; m < 4; ++m) members.emplace_back(fixture::random_partition(rng, 30, 2 + static_cast<int>(rng.below(4))));
    const auto e = Ensemble::of(members);
    const int k = 2 + static_cast<int>(rng.below(4));
    for (auto method : {ConsensusMethod::kCspa, ConsensusMethod::kMcla, ConsensusMethod::kNmf}) {
      EXPECT_EQ(run_consensus(method, e, k, static_cast<std::uint64_t>(t)).k(), k) << to_string(method);
    }
  }
}

TEST(Nmf, ObjectiveNonIncreasing) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<Labeling> members;
    for (int m = 0; m < 5; ++m) members.emplace_back(fixture::random_partition(rng, 40, 3));
    const auto e = Ensemble::of(members);
    const double tol = 1e-10 * frobenius2(coassociation(e));
    std::vector<double> trace;
    nmf_consensus(e, 3, static_cast<std::uint64_t>(t), {}, &trace);
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + tol);
  }
}

TEST(Hbgf, DegenerateEnsembleThrows) {
  // Two hyperedges cannot support k = 3.
  const auto e = Ensemble::of({Labeling{0, 0, 1, 1, 0, 1}});
  EXPECT_THROW(hbgf(e, 3, 0), Error);
}

TEST(Consensus, RejectsSmallKAndHugeInputs) {
  const auto e = Ensemble::of({Labeling{0, 1, 0, 1}});
  EXPECT_THROW(cspa(e, 1, 0), Error);
  std::vector<int> labels(kMaxCoassociationItems + 1, 0);
  labels[0] = 1;
  const auto large = Ensemble::of({Labeling(labels)});
  EXPECT_THROW(cspa(large, 2, 0), Error);
  EXPECT_THROW(nmf_consensus(large, 2, 0), Error);
}

TEST(AggregateGroup, PicksHighestAnmiAndReportsCandidates) {
  Rng rng(5);
  const Labeling truth(fixture::random_partition(rng, 50, 2));
  const auto e = Ensemble::of({truth, truth, truth});
  const auto d = aggregate_group_detailed(e, 2, 1);
  EXPECT_FALSE(d.candidates.empty());
  for (const auto& c : d.candidates) EXPECT_LE(c.anmi, d.selected.anmi);
  EXPECT_EQ(d.selected.anmi, 1.0);
  EXPECT_EQ(d.selected.method, ConsensusMethod::kCspa);  // ties go to the earlier method
}

TEST(AssignTargets, MatchesGroupsToCategories) {
  std::vector<Category> cats(2);
  cats[0].name = "color";
  cats[0].target_k = 3;
  cats[0].initial_prompt = "What color?";
  cats[1].name = "shape";
  cats[1].target_k = 2;
  cats[1].initial_prompt = "What shape?";
  const PromptSpec spec(cats);
  const Labeling l{0, 1, 0, 1};
  std::vector<EnsembleMember> members;
  for (const auto& p : spec.prompts()) members.push_back({p.prompt_id, Representation::kTfidf, l});
  const Ensemble e(members);
  // Prompts: color.q0, color.q0.concise, shape.q0, shape.q0.concise.
  GroupingResult g;
  g.assignment = {0, 0, 1, 1};
  g.groups = {{0, 1}, {2, 3}};
  auto a = assign_targets(g, spec, e);
  EXPECT_EQ(a.category, (std::vector<int>{0, 1}));
  EXPECT_EQ(a.target_k, (std::vector<int>{3, 2}));
  EXPECT_EQ(a.votes[0], (std::vector<int>{2, 0}));

  // Swapped groups follow their members.
  g.assignment = {1, 1, 0, 0};
  g.groups = {{2, 3}, {0, 1}};
  a = assign_targets(g, spec, e);
  EXPECT_EQ(a.target_k, (std::vector<int>{2, 3}));

  g.groups = {{0, 1, 2, 3}};
  g.assignment = {0, 0, 0, 0};
  EXPECT_THROW(assign_targets(g, spec, e), Error);
  g.approximate = true;
  EXPECT_EQ(assign_targets(g, spec, e).target_k, (std::vector<int>{3}));
}
