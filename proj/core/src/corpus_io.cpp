#include "tgaicc/corpus_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tgaicc/error.hpp"

namespace tgaicc {

using nlohmann::json;

json to_json(const ItemRecord& item) {
  json doc;
  doc["item_id"] = item.item_id;
  doc["image_ref"] = item.image_ref ? json(*item.image_ref) : json(nullptr);
  doc["texts"] = item.texts;
  doc["truth_labels"] = item.truth_labels;
  return doc;
}

ItemRecord item_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("corpus record is not a JSON object");
  ItemRecord item;
  item.item_id = doc.at("item_id").get<std::string>();
  if (auto it = doc.find("image_ref"); it != doc.end() && !it->is_null()) {
    item.image_ref = it->get<std::string>();
  }
  if (auto it = doc.find("texts"); it != doc.end() && !it->is_null()) {
    item.texts = it->get<std::map<std::string, std::string>>();
  }
  if (auto it = doc.find("truth_labels"); it != doc.end() && !it->is_null()) {
    for (const auto& [key, value] : it->items()) {
      // Numeric labels (e.g. card ranks) are accepted and kept as strings.
      item.truth_labels[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return item;
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.items.push_back(item_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& item : corpus.items) out << to_json(item).dump() << '\n';
}

void save_corpus_atomic(const std::filesystem::path& path, const Corpus& corpus) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    write_corpus(out, corpus);
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PromptSpec prompt_spec_from_json(const json& doc) {
  std::vector<Category> categories;
  for (const auto& c : doc.at("categories")) {
    Category cat;
    cat.name = c.at("name").get<std::string>();
    cat.target_k = c.at("target_k").get<int>();
    cat.initial_prompt = c.at("initial_prompt").get<std::string>();
    if (auto it = c.find("paraphrases"); it != c.end()) {
      cat.paraphrases = it->get<std::vector<std::string>>();
    }
    if (auto it = c.find("concise_suffix"); it != c.end()) {
      cat.concise_suffix = it->get<std::string>();
    }
    categories.push_back(std::move(cat));
  }
  return PromptSpec(std::move(categories));
}

json to_json(const PromptSpec& spec) {
  json cats = json::array();
  for (const auto& c : spec.categories()) {
    cats.push_back({{"name", c.name},
                    {"target_k", c.target_k},
                    {"initial_prompt", c.initial_prompt},
                    {"paraphrases", c.paraphrases},
                    {"concise_suffix", c.concise_suffix}});
  }
  return json{{"categories", cats}};
}

PromptSpec load_prompt_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open prompt spec " + path.string());
  try {
    return prompt_spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error("prompt spec " + path.string() + ": " + e.what());
  }
}

void save_prompt_spec(const std::filesystem::path& path, const PromptSpec& spec) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(spec).dump(2) << '\n';
}

}  // namespace tgaicc
