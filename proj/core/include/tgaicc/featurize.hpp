#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgaicc/core_model.hpp"
#include "tgaicc/matrix.hpp"

namespace tgaicc {

struct FeatureMatrix {
  Matrix data;  // n x d, rows L2-normalized (all-zero for empty documents)
  Representation representation = Representation::kTfidf;
  std::map<std::string, std::size_t> vocabulary;  // tfidf only: token -> column

  std::size_t rows() const { return data.rows(); }
  std::size_t dims() const { return data.cols(); }
};

/// Lowercased runs of letters/digits. Runs of one code point are dropped
/// unless they are a digit, so "2" survives but "a" does not.
///
/// Input is UTF-8. Letters are recognized for ASCII, Latin-1/Latin Extended,
/// Greek, Cyrillic, Armenian, Hebrew, Arabic, kana, CJK ideographs and
/// Hangul; case folding covers the cased scripts among these. Invalid bytes
/// act as separators.
std::vector<std::string> tokenize(std::string_view text);

struct TfidfOptions {
  int min_df = 1;  // drop tokens present in fewer documents
};

// tf = raw count, idf = ln((1 + n) / (1 + df)) + 1, rows L2-normalized,
// columns in lexicographic token order. Throws Error("empty vocabulary") if
// no document has a token.
FeatureMatrix tfidf(std::span<const std::string> texts, const TfidfOptions& options = {});

// Scales every non-zero row to unit L2 norm.
void normalize_rows(Matrix& m);

// AEMB1 embedding file: "AEMB1", u32 LE n, u32 LE d, n*d f32 LE row-major.
inline constexpr std::string_view kEmbeddingMagic = "AEMB1";

// Raw payload as stored (no normalization); throws on a bad magic, a
// truncated or oversized payload, or non-finite values.
Matrix read_embeddings_raw(std::istream& in);
void write_embeddings(std::ostream& out, const Matrix& m);
void save_embeddings(const std::filesystem::path& path, const Matrix& m);

// Reads an AEMB1 file and L2-normalizes its rows.
FeatureMatrix load_embeddings(const std::filesystem::path& path);
FeatureMatrix dense_features(Matrix m);

}  // namespace tgaicc
