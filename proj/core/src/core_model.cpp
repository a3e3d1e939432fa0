#include "tgaicc/core_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tgaicc/error.hpp"

namespace tgaicc {

std::string_view to_string(Representation rep) {
  return rep == Representation::kTfidf ? "tfidf" : "dense";
}

Representation parse_representation(std::string_view text) {
  if (text == "tfidf") return Representation::kTfidf;
  if (text == "dense") return Representation::kDense;
  throw Error("unknown representation '" + std::string(text) + "' (expected tfidf|dense)");
}

std::vector<int> canonicalize(std::span<const int> labels) {
  if (labels.empty()) throw Error("empty labeling");
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = remap.try_emplace(label, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

Labeling::Labeling(std::span<const int> raw) : labels_(canonicalize(raw)) {
  k_ = *std::max_element(labels_.begin(), labels_.end()) + 1;
}

Labeling Labeling::from_names(std::span<const std::string> names) {
  if (names.empty()) throw Error("empty labeling");
  std::map<std::string, int> ids;
  std::vector<int> raw;
  raw.reserve(names.size());
  for (const auto& name : names) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<int>(ids.size()));
    raw.push_back(it->second);
  }
  return Labeling(raw);
}

std::vector<std::size_t> Labeling::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k_), 0);
  for (int label : labels_) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

Labeling canonicalize(const Labeling& labeling) { return labeling; }

std::vector<std::string> Corpus::texts_for(const std::string& prompt_id) const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    auto it = item.texts.find(prompt_id);
    out.push_back(it == item.texts.end() ? std::string() : it->second);
  }
  return out;
}

std::optional<Labeling> Corpus::truth_for(const std::string& category) const {
  if (items.empty()) return std::nullopt;
  std::vector<std::string> names;
  names.reserve(items.size());
  for (const auto& item : items) {
    auto it = item.truth_labels.find(category);
    if (it == item.truth_labels.end()) return std::nullopt;
    names.push_back(it->second);
  }
  return Labeling::from_names(names);
}

std::vector<std::string> Category::base_questions() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& q) {
    if (q.empty()) return;
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  };
  add(initial_prompt);
  for (const auto& p : paraphrases) add(p);
  return out;
}

std::vector<Prompt> Category::prompts() const {
  std::vector<Prompt> out;
  const auto questions = base_questions();
  for (std::size_t j = 0; j < questions.size(); ++j) {
    const std::string id = name + ".q" + std::to_string(j);
    out.push_back({id, name, questions[j], false});
    std::string concise_text = questions[j];
    if (!concise_suffix.empty()) concise_text += " " + concise_suffix;
    out.push_back({id + ".concise", name, concise_text, true});
  }
  return out;
}

PromptSpec::PromptSpec(std::vector<Category> categories) : categories_(std::move(categories)) {
  if (categories_.empty()) throw Error("prompt spec needs at least one category");
  std::set<std::string> names;
  for (const auto& cat : categories_) {
    if (cat.name.empty()) throw Error("category with empty name");
    if (!names.insert(cat.name).second) throw Error("duplicate category '" + cat.name + "'");
    if (cat.target_k < 2) {
      throw Error("category '" + cat.name + "' has target_k " + std::to_string(cat.target_k) +
                  " (must be >= 2)");
    }
    auto prompts = cat.prompts();
    if (prompts.empty()) throw Error("category '" + cat.name + "' has no prompts");
    for (auto& p : prompts) {
      if (!prompt_index_.emplace(p.prompt_id, prompts_.size()).second) {
        throw Error("duplicate prompt id '" + p.prompt_id + "'");
      }
      prompts_.push_back(std::move(p));
    }
  }
}

const Prompt& PromptSpec::prompt(const std::string& prompt_id) const {
  auto it = prompt_index_.find(prompt_id);
  if (it == prompt_index_.end()) throw Error("unknown prompt id '" + prompt_id + "'");
  return prompts_[it->second];
}

bool PromptSpec::has_prompt(const std::string& prompt_id) const {
  return prompt_index_.count(prompt_id) != 0;
}

std::size_t PromptSpec::category_index(const std::string& name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == name) return i;
  }
  throw Error("unknown category '" + name + "'");
}

std::size_t PromptSpec::category_of_prompt(const std::string& prompt_id) const {
  return category_index(prompt(prompt_id).category_name);
}

std::vector<int> PromptSpec::target_ks() const {
  std::vector<int> out;
  for (const auto& cat : categories_) out.push_back(cat.target_k);
  return out;
}

Ensemble::Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("empty ensemble");
  const std::size_t n = members_.front().labeling.size();
  if (n == 0) throw Error("ensemble member with empty labeling");
  for (const auto& m : members_) {
    if (m.labeling.size() != n) {
      throw Error("ensemble member '" + m.prompt_id + "' has " +
                  std::to_string(m.labeling.size()) + " labels, expected " + std::to_string(n));
    }
  }
}

Ensemble Ensemble::of(std::vector<Labeling> labelings) {
  std::vector<EnsembleMember> members;
  for (std::size_t i = 0; i < labelings.size(); ++i) {
    members.push_back({"m" + std::to_string(i), Representation::kTfidf, std::move(labelings[i])});
  }
  return Ensemble(std::move(members));
}

Ensemble Ensemble::subset(std::span<const int> indices) const {
  std::vector<EnsembleMember> out;
  for (int i : indices) out.push_back(members_.at(static_cast<std::size_t>(i)));
  return Ensemble(std::move(out));
}

std::vector<Issue> validate_corpus(const Corpus& corpus, const PromptSpec& prompts) {
  std::vector<Issue> issues;
  if (corpus.items.empty()) issues.push_back({"", "", "corpus has no items"});

  std::set<std::string> seen;
  for (const auto& item : corpus.items) {
    if (item.item_id.empty()) issues.push_back({"", "", "item with empty item_id"});
    if (!seen.insert(item.item_id).second) {
      issues.push_back({item.item_id, "", "duplicate item_id"});
    }
    for (const auto& p : prompts.prompts()) {
      if (item.texts.count(p.prompt_id) == 0) {
        issues.push_back({item.item_id, p.prompt_id, "missing text"});
      }
    }
    for (const auto& [pid, text] : item.texts) {
      if (!prompts.has_prompt(pid)) issues.push_back({item.item_id, pid, "unknown prompt id"});
    }
    for (const auto& [cat, label] : item.truth_labels) {
      bool known = false;
      for (const auto& c : prompts.categories()) known = known || c.name == cat;
      if (!known) issues.push_back({item.item_id, "", "unknown truth category '" + cat + "'"});
    }
  }
  return issues;
}

std::string format_issues(std::span<const Issue> issues) {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << "  ";
    if (!issue.item_id.empty()) out << "item '" << issue.item_id << "' ";
    if (!issue.prompt_id.empty()) out << "prompt '" << issue.prompt_id << "' ";
    out << issue.message << '\n';
  }
  return out.str();
}

}  // namespace tgaicc
