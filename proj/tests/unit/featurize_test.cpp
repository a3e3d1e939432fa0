#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "tgaicc/error.hpp"
#include "tgaicc/featurize.hpp"

using namespace tgaicc;

namespace {

std::vector<std::string> tokens_of(const FeatureMatrix& m) {
  std::vector<std::string> out(m.vocabulary.size());
  for (const auto& [token, column] : m.vocabulary) out.at(column) = token;
  return out;
}

}  // namespace

TEST(Tokenize, LowercasesAndDropsSingleLetters) {
  EXPECT_EQ(tokenize("A Heart, two-of-CLUBS!"), (std::vector<std::string>{"heart", "two", "of", "clubs"}));
  EXPECT_EQ(tokenize("rank 2 or 10"), (std::vector<std::string>{"rank", "2", "or", "10"}));
  EXPECT_TRUE(tokenize("  ,.; a b ").empty());
}

TEST(Tokenize, HandlesUtf8Letters) {
  EXPECT_EQ(tokenize("Café ÉCLAIR naïve"), (std::vector<std::string>{"café", "éclair", "naïve"}));
}

// Reference: scikit-learn TfidfVectorizer() on ["heart two", "heart"].
TEST(Tfidf, FrozenReferenceValues) {
  const std::vector<std::string> docs{"heart two", "heart"};
  const auto m = tfidf(docs);
  ASSERT_EQ(tokens_of(m), (std::vector<std::string>{"heart", "two"}));
  EXPECT_NEAR(m.data(0, 0), 0.5797386715376657, 1e-15);
  EXPECT_NEAR(m.data(0, 1), 0.8148024746671689, 1e-15);
  EXPECT_EQ(m.data(1, 0), 1.0);
  EXPECT_EQ(m.data(1, 1), 0.0);
  EXPECT_EQ(m.representation, Representation::kTfidf);
}

TEST(Tfidf, RowsHaveUnitNormOrZero) {
  const std::vector<std::string> docs{"a", "the suit is hearts hearts", "clubs", "", "12 12 12 rank"};
  const auto m = tfidf(docs);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double norm2 = dot(m.data.row(r), m.data.row(r));
    EXPECT_TRUE(norm2 == 0.0 || std::abs(norm2 - 1.0) < 1e-12) << r;
  }
}

TEST(Tfidf, OracleIdfFormula) {
  const std::vector<std::string> docs{"x1 yy yy", "yy zz", "zz zz zz"};
  const auto m = tfidf(docs);
  // Hand-built: idf = ln((1 + n) / (1 + df)) + 1, then L2 rows.
  const double n = 3;
  auto idf = [&](double df) { return std::log((1 + n) / (1 + df)) + 1; };
  std::vector<std::vector<double>> raw = {{1 * idf(1), 2 * idf(2), 0}, {0, 1 * idf(2), 1 * idf(2)}, {0, 0, 3 * idf(2)}};
  ASSERT_EQ(tokens_of(m), (std::vector<std::string>{"x1", "yy", "zz"}));
  for (std::size_t r = 0; r < 3; ++r) {
    double norm = 0;
    for (double v : raw[r]) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(m.data(r, c), raw[r][c] / norm, 1e-15);
  }
}

TEST(Tfidf, MinDfAndEmptyVocabulary) {
  const std::vector<std::string> docs{"heart two", "heart"};
  TfidfOptions opts;
  opts.min_df = 2;
  EXPECT_EQ(tokens_of(tfidf(docs, opts)), (std::vector<std::string>{"heart"}));
  const std::vector<std::string> empty{"a", ""};
  EXPECT_THROW(tfidf(empty), Error);
}

TEST(Embeddings, RoundTrip) {
  Matrix m(2, 3);
  m(0, 0) = 1.5;
  m(1, 2) = -0.25;
  std::stringstream buf;
  write_embeddings(buf, m);
  EXPECT_EQ(buf.str().substr(0, 5), "AEMB1");
  EXPECT_EQ(buf.str().size(), 5u + 8u + 6u * 4u);
  EXPECT_EQ(read_embeddings_raw(buf), m);
}

TEST(Embeddings, RejectsCorruptFiles) {
  Matrix m(2, 2, 0.5);
  std::stringstream good;
  write_embeddings(good, m);
  const std::string bytes = good.str();

  std::stringstream bad_magic("XEMB1" + bytes.substr(5));
  EXPECT_THROW(read_embeddings_raw(bad_magic), Error);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_embeddings_raw(truncated), Error);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(read_embeddings_raw(trailing), Error);

  Matrix nan(1, 1, std::numeric_limits<double>::quiet_NaN());
  std::stringstream with_nan;
  write_embeddings(with_nan, nan);
  EXPECT_THROW(read_embeddings_raw(with_nan), Error);
}

TEST(Embeddings, FileLoadNormalizesRows) {
  const auto path = std::filesystem::temp_directory_path() / "tgaicc_featurize_test.aemb";
  Matrix m(2, 2);
  m(0, 0) = 3;
  m(0, 1) = 4;
  m(1, 1) = 2;
  save_embeddings(path, m);
  const auto f = load_embeddings(path);
  std::filesystem::remove(path);
  EXPECT_EQ(f.representation, Representation::kDense);
  EXPECT_NEAR(f.data(0, 0), 0.6, 1e-7);
  EXPECT_NEAR(f.data(0, 1), 0.8, 1e-7);
  EXPECT_EQ(f.data(1, 1), 1.0);
}
