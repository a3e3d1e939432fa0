#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgaicc/core_model.hpp"
#include "tgaicc/grouping.hpp"
#include "tgaicc/matrix.hpp"
#include "tgaicc/rng.hpp"

namespace fixture {

// Uniform random labels in [0, k); not necessarily using every value.
std::vector<int> random_labels(tgaicc::Rng& rng, std::size_t n, int k);

// Random labels that use each of the k values at least once.
std::vector<int> random_partition(tgaicc::Rng& rng, std::size_t n, int k);

// Two Gaussian blobs (sd 0.1) centred at (0, 0) and (10, 10), rows
// alternating between them. Returns points and the true labels.
struct Blobs {
  tgaicc::Matrix points;
  std::vector<int> labels;
};
Blobs two_blobs(std::uint64_t seed, std::size_t per_blob, std::size_t dims = 2);

// Symmetric matrix with zero diagonal and entries uniform in [0, 1).
std::vector<std::vector<double>> random_distances(tgaicc::Rng& rng, std::size_t m);
tgaicc::DistanceMatrix to_condensed(const std::vector<std::vector<double>>& d);

// Members [0, half) and [half, m) form blocks with distance `intra` inside
// and `inter` across.
tgaicc::DistanceMatrix two_block(std::size_t m, double intra, double inter);

// Playing-card corpus: 13 ranks x 4 suits x `variants` items. Every item
// has texts for the six rank and six suit prompts, one answer template per
// prompt, in which each token is replaced with probability `noise` by a
// random word from the vocabulary of all answers (template and class words). Truth categories are "rank" and "suit".
struct Cards {
  tgaicc::Corpus corpus;
  tgaicc::PromptSpec prompts;
};
Cards cards(std::uint64_t seed, int variants = 8, double noise = 0.05);

extern const std::vector<std::string> kSuits;  // singular: heart, diamond, club, spade
extern const std::vector<std::string> kRanks;

}  // namespace fixture
