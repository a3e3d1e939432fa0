#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tgaicc {

enum class Representation { kTfidf, kDense };

std::string_view to_string(Representation rep);
Representation parse_representation(std::string_view text);

// Renumbers labels by order of first appearance: [2,2,0,1] -> [0,0,1,2].
// Throws Error("empty labeling") on an empty input.
std::vector<int> canonicalize(std::span<const int> labels);

/// A partition of n items into k clusters.
///
/// Labels are always stored canonically (dense, first-appearance order), so
/// two labelings describing the same partition compare equal and every value
/// in [0, k) occurs at least once.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::span<const int> raw);
  explicit Labeling(const std::vector<int>& raw) : Labeling(std::span<const int>(raw)) {}
  Labeling(std::initializer_list<int> raw) : Labeling(std::vector<int>(raw)) {}

  // Builds a labeling from arbitrary string labels (e.g. ground-truth names).
  static Labeling from_names(std::span<const std::string> names);

  std::size_t size() const { return labels_.size(); }
  int k() const { return k_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<std::size_t> cluster_sizes() const;

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

Labeling canonicalize(const Labeling& labeling);

struct ItemRecord {
  std::string item_id;
  std::optional<std::string> image_ref;
  std::map<std::string, std::string> texts;         // prompt_id -> generated text
  std::map<std::string, std::string> truth_labels;  // category name -> label
};

struct Corpus {
  std::vector<ItemRecord> items;

  std::size_t size() const { return items.size(); }

  // Per-item text for one prompt, in corpus order. Missing cells are empty.
  std::vector<std::string> texts_for(const std::string& prompt_id) const;

  // Ground truth for a category, or nullopt if any item lacks a label.
  std::optional<Labeling> truth_for(const std::string& category) const;
};

struct Prompt {
  std::string prompt_id;
  std::string category_name;
  std::string text;
  bool concise = false;
};

inline constexpr std::string_view kDefaultConciseSuffix = "Answer concisely.";

struct Category {
  std::string name;
  int target_k = 2;
  std::string initial_prompt;
  std::vector<std::string> paraphrases;
  std::string concise_suffix = std::string(kDefaultConciseSuffix);

  // Base questions: the initial prompt followed by paraphrases, with exact
  // duplicates removed (first copy kept).
  std::vector<std::string> base_questions() const;

  // Every base question in a plain and a concise variant. Ids are
  // "<name>.q<j>" and "<name>.q<j>.concise".
  std::vector<Prompt> prompts() const;
};

/// Validated set of categories; t = number of categories.
class PromptSpec {
 public:
  PromptSpec() = default;
  // Throws Error when t < 1, a category has target_k < 2, a name repeats or
  // a category has no prompt text.
  explicit PromptSpec(std::vector<Category> categories);

  std::size_t t() const { return categories_.size(); }
  const std::vector<Category>& categories() const { return categories_; }
  const std::vector<Prompt>& prompts() const { return prompts_; }

  const Prompt& prompt(const std::string& prompt_id) const;
  bool has_prompt(const std::string& prompt_id) const;
  std::size_t category_index(const std::string& name) const;
  std::size_t category_of_prompt(const std::string& prompt_id) const;

  // Target cluster counts {z_1, ..., z_t}.
  std::vector<int> target_ks() const;

 private:
  std::vector<Category> categories_;
  std::vector<Prompt> prompts_;
  std::map<std::string, std::size_t> prompt_index_;
};

struct EnsembleMember {
  std::string prompt_id;
  Representation representation = Representation::kTfidf;
  Labeling labeling;
};

// Non-empty list of clusterings over the same n items.
class Ensemble {
 public:
  Ensemble() = default;
  // Throws Error on an empty member list or mismatched lengths.
  explicit Ensemble(std::vector<EnsembleMember> members);
  // Convenience for anonymous members (prompt ids "m0", "m1", ...).
  static Ensemble of(std::vector<Labeling> labelings);

  std::size_t size() const { return members_.size(); }
  std::size_t n() const { return members_.front().labeling.size(); }
  const EnsembleMember& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<EnsembleMember>& members() const { return members_; }

  // Members at `indices`, in that order.
  Ensemble subset(std::span<const int> indices) const;

 private:
  std::vector<EnsembleMember> members_;
};

struct Issue {
  std::string item_id;
  std::string prompt_id;
  std::string message;

  friend bool operator==(const Issue&, const Issue&) = default;
};

// Empty iff every item has text for every prompt and the corpus invariants
// hold; otherwise one entry per violation.
std::vector<Issue> validate_corpus(const Corpus& corpus, const PromptSpec& prompts);

std::string format_issues(std::span<const Issue> issues);

}  // namespace tgaicc
