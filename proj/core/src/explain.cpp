#include "tgaicc/explain.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "tgaicc/error.hpp"
#include "tgaicc/featurize.hpp"

namespace tgaicc {

namespace detail {
const std::vector<std::string_view>& bundled_stopwords();
}  // namespace detail

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

const WordSet& default_singular_exceptions() {
  static const WordSet words = {"glasses", "series", "species", "news", "this", "his", "its", "was", "has",
                                "is", "as", "us", "yes", "always", "perhaps", "whereas", "various", "gas",
                                "bus", "lens", "physics", "mathematics"};
  return words;
}

std::string normalize_word(std::string_view token, const WordSet& exceptions) {
  std::string word = ascii_lower(token);
  if (exceptions.count(word) != 0) return word;
  if (ends_with(word, "ies") && word.size() > 3) return word.substr(0, word.size() - 3) + "y";
  if (ends_with(word, "ses")) return word.substr(0, word.size() - 2);
  if (word.size() > 3 && ends_with(word, "s") && !ends_with(word, "ss")) return word.substr(0, word.size() - 1);
  return word;
}

const WordSet& default_stopwords() {
  static const WordSet words = [] {
    WordSet out;
    for (auto w : detail::bundled_stopwords()) out.emplace(w);
    return out;
  }();
  return words;
}

WordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file " + path.string());
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.insert(line.substr(first, last - first + 1));
  }
  return out;
}

Explanation explain_group(std::span<const std::string> texts, int z, const WordSet& stopwords,
                          const WordSet& exceptions) {
  if (z < 1) throw Error("explain_group: z must be >= 1");
  WordSet blocked;
  for (const auto& w : stopwords) {
    for (const auto& token : tokenize(w)) blocked.insert(normalize_word(token, exceptions));
  }

  std::map<std::string, std::int64_t> counts;
  for (const auto& text : texts) {
    for (const auto& token : tokenize(text)) {
      std::string word = normalize_word(token, exceptions);
      if (blocked.count(word) == 0) ++counts[std::move(word)];
    }
  }

  Explanation out;
  out.z = z;
  for (auto& [word, count] : counts) out.words.push_back({word, count});
  // std::map iteration is lexicographic, so a stable sort on count keeps
  // ties in lexicographic order.
  std::stable_sort(out.words.begin(), out.words.end(),
                   [](const WordCount& a, const WordCount& b) { return a.count > b.count; });
  if (out.words.size() > static_cast<std::size_t>(z)) out.words.resize(static_cast<std::size_t>(z));
  out.short_result = out.words.size() < static_cast<std::size_t>(z);
  return out;
}

}  // namespace tgaicc
