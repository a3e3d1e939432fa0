#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgaicc/consensus.hpp"
#include "tgaicc/core_model.hpp"
#include "tgaicc/explain.hpp"
#include "tgaicc/featurize.hpp"
#include "tgaicc/grouping.hpp"
#include "tgaicc/kmeans.hpp"

namespace tgaicc {

enum class Aggregation { kConsensus, kConcat };
enum class EnsembleScope { kPerRepresentation, kMixed };

std::string_view to_string(Aggregation a);
std::string_view to_string(EnsembleScope s);
Aggregation parse_aggregation(std::string_view text);
EnsembleScope parse_scope(std::string_view text);  // "per-rep" | "mixed"

// Evaluation repeats every run with this many seeds (0..9) by default.
inline constexpr int kDefaultSeedCount = 10;
std::vector<std::uint64_t> default_seeds();

// Parses "0..9" (inclusive range), "3", or "1,4,7".
std::vector<std::uint64_t> parse_seeds(std::string_view text);

// Dense sentence embeddings for a batch of texts, one row per text.
using TextEmbedder = std::function<FeatureMatrix(std::span<const std::string>)>;

struct RunConfig {
  Representation representation = Representation::kTfidf;
  Strategy strategy = Strategy::kMax;
  Aggregation aggregation = Aggregation::kConsensus;
  std::vector<std::uint64_t> seeds = default_seeds();
  EnsembleScope scope = EnsembleScope::kPerRepresentation;
  KMeansOptions kmeans;
  TfidfOptions tfidf;
  bool explain = true;
  // Also drop words that occur in a group's own prompt texts when explaining.
  bool filter_prompt_words = true;
  WordSet stopwords = default_stopwords();
  int threads = 1;
};

// Scores are on the 0-100 scale.
struct TruthScore {
  std::string truth;
  double ari = 0.0;
  double ami = 0.0;
};

struct OutputRecord {
  int group = 0;
  std::vector<std::string> members;  // "<prompt_id>@<representation>"
  std::string target_category;
  int target_k = 0;
  std::string method;               // CSPA | MCLA | HBGF | NMF | concat
  std::optional<double> anmi;       // consensus only
  std::vector<std::string> failed_methods;
  std::optional<TruthScore> score;  // against the matched ground truth
  std::optional<Explanation> explanation;
};

struct PromptRecord {
  std::string prompt_id;
  std::string category;
  Representation representation = Representation::kTfidf;
  std::optional<TruthScore> score;
};

struct GroupingInfo {
  double threshold = 0.0;
  Strategy strategy = Strategy::kMax;
  bool approximate = false;
  std::vector<std::vector<int>> votes;  // votes[group][category]
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::optional<GroupingInfo> grouping;  // TGAICC runs only
  std::vector<OutputRecord> outputs;
  std::vector<PromptRecord> prompts;     // avg-prompt baseline only
  std::vector<TruthScore> cells;         // per ground truth, this seed
};

struct CellAverage {
  std::string truth;
  double ari = 0.0;
  double ami = 0.0;
  int runs = 0;  // seeds contributing
};

struct EvalReport {
  std::string mode;  // "tgaicc" | "baseline-avg-prompt" | "baseline-concat"
  RunConfig config;
  std::vector<std::string> categories;
  std::vector<SeedRun> runs;
  std::vector<CellAverage> averages;  // arithmetic mean of per-seed cells
  std::optional<double> mean_ari;     // mean over averaged cells
  std::optional<double> mean_ami;
};

/// Full alternative-clustering pipeline.
///
/// Per seed: cluster every prompt's texts with its category's k, group the
/// clusterings by 1 - AMI under single linkage and the min/max threshold
/// search, give each group a target k, aggregate it (consensus or text
/// concatenation), match outputs to ground truths and score them.
/// Throws Error listing validation issues for an incomplete corpus.
EvalReport run_tgaicc(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                      const TextEmbedder& embedder = {});

// Clusters each prompt separately and averages its scores per category.
EvalReport baseline_avg_prompt(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                               const TextEmbedder& embedder = {});

// Joins each item's texts over a category's prompts (sorted prompt ids,
// single space) and clusters the result.
EvalReport baseline_concat_category(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                                    const TextEmbedder& embedder = {});

/// Pairs outputs with ground truths by maximum total AMI, one-to-one.
/// Returns the truth index per output (-1 if unmatched). Earlier outputs get
/// lower truth indices among equally good matchings. Throws Error on a size
/// mismatch unless `approximate`.
std::vector<int> match_outputs_to_truths(std::span<const Labeling> outputs, std::span<const Labeling> truths,
                                         bool approximate = false);

// Joins each item's texts for `prompt_ids` in sorted id order.
std::vector<std::string> concatenated_texts(const Corpus& corpus, std::vector<std::string> prompt_ids);

}  // namespace tgaicc
