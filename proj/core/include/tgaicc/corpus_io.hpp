#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json_fwd.hpp>

#include "tgaicc/core_model.hpp"

namespace tgaicc {

// Corpus: JSON Lines, one object per item with keys item_id, image_ref,
// texts and truth_labels. Blank lines are ignored.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a half-written corpus.
void save_corpus_atomic(const std::filesystem::path& path, const Corpus& corpus);

// PromptSpec: {"categories": [{"name", "target_k", "initial_prompt",
// "paraphrases", "concise_suffix"}]}.
PromptSpec prompt_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PromptSpec& spec);
PromptSpec load_prompt_spec(const std::filesystem::path& path);
void save_prompt_spec(const std::filesystem::path& path, const PromptSpec& spec);

nlohmann::json to_json(const ItemRecord& item);
ItemRecord item_from_json(const nlohmann::json& doc);

}  // namespace tgaicc
