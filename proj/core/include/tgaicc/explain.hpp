#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tgaicc {

using WordSet = std::set<std::string, std::less<>>;

// Words the singularizer leaves alone.
const WordSet& default_singular_exceptions();

// Lowercases and singularizes one token: "ies" -> "y", "ses" -> "s",
// otherwise a trailing "s" is dropped when the word is longer than 3 and
// does not end in "ss". Words in `exceptions` are only lowercased.
std::string normalize_word(std::string_view token, const WordSet& exceptions = default_singular_exceptions());

// Bundled English stopword list.
const WordSet& default_stopwords();

// One word per line, UTF-8; blank lines and lines starting with '#' are skipped.
WordSet load_stopwords(const std::filesystem::path& path);

struct WordCount {
  std::string word;
  std::int64_t count = 0;

  friend bool operator==(const WordCount&, const WordCount&) = default;
};

struct Explanation {
  int group_id = 0;
  int z = 0;
  std::vector<WordCount> words;  // counts non-increasing, ties in lexicographic order
  bool short_result = false;     // fewer than z distinct words survived filtering
};

/// The z most frequent normalized words across `texts`.
///
/// Texts are tokenized, each token normalized, and any word whose
/// normalized form matches a normalized stopword is dropped. Throws Error
/// when z < 1.
Explanation explain_group(std::span<const std::string> texts, int z, const WordSet& stopwords,
                          const WordSet& exceptions = default_singular_exceptions());

}  // namespace tgaicc
