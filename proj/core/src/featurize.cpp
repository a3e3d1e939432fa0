#include "tgaicc/featurize.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "tgaicc/error.hpp"

namespace tgaicc {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[pos]; advances pos. Malformed
// sequences yield kInvalid and consume one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + static_cast<std::size_t>(len) > text.size()) {
    ++pos;
    return kInvalid;
  }
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + static_cast<std::size_t>(i)]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += static_cast<std::size_t>(len);
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c < 0x80) return false;
  if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
  if (c >= 0xC0 && c <= 0x24F) return c != 0xD7 && c != 0xF7;  // Latin-1 letters, Latin Extended
  if (c >= 0x370 && c <= 0x3FF) return c != 0x37E && c != 0x387 && c != 0x375;  // Greek
  if (c >= 0x400 && c <= 0x52F) return !(c >= 0x482 && c <= 0x489);             // Cyrillic
  if (c >= 0x531 && c <= 0x587) return !(c >= 0x557 && c <= 0x560);             // Armenian
  if (c >= 0x5D0 && c <= 0x5EA) return true;                                     // Hebrew
  if (c >= 0x620 && c <= 0x64A) return true;                                     // Arabic
  if (c >= 0x3041 && c <= 0x30FF) return c != 0x30FB;                            // kana
  if (c >= 0x4E00 && c <= 0x9FFF) return true;                                   // CJK
  if (c >= 0xAC00 && c <= 0xD7A3) return true;                                   // Hangul
  return false;
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) return c + 32;
  if (c == 0x178) return 0xFF;
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x131 && c != 0x138 && c != 0x149 && c != 0x17F) {
    // Latin Extended-A alternates upper/lower, with an offset between 0x139
    // and 0x148 and again from 0x179.
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    const bool is_upper = odd_upper ? (c % 2 == 1) : (c % 2 == 0);
    return is_upper ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;  // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 32;                 // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x531 && c <= 0x556) return c + 48;                 // Armenian
  return c;
}

std::uint32_t read_u32_le(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw Error("embedding file truncated in header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;
  bool current_digit = true;

  auto flush = [&] {
    if (current_len >= 2 || (current_len == 1 && current_digit)) tokens.push_back(current);
    current.clear();
    current_len = 0;
    current_digit = true;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    const bool digit = is_digit(cp);
    if (cp != kInvalid && (digit || is_letter(cp))) {
      encode_utf8(to_lower(cp), current);
      ++current_len;
      current_digit = current_digit && digit;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const double norm = std::sqrt(dot(row, row));
    if (norm == 0.0) continue;
    for (auto& v : row) v /= norm;
  }
}

FeatureMatrix tfidf(std::span<const std::string> texts, const TfidfOptions& options) {
  const std::size_t n = texts.size();
  std::vector<std::map<std::string, int>> counts(n);
  std::map<std::string, int> df;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& token : tokenize(texts[i])) ++counts[i][std::move(token)];
    for (const auto& [token, c] : counts[i]) ++df[token];
  }

  FeatureMatrix out;
  out.representation = Representation::kTfidf;
  std::vector<double> idf;
  for (const auto& [token, d] : df) {
    if (d < options.min_df) continue;
    out.vocabulary.emplace(token, idf.size());
    idf.push_back(std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  if (idf.empty()) throw Error("empty vocabulary");

  out.data = Matrix(n, idf.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [token, c] : counts[i]) {
      auto it = out.vocabulary.find(token);
      if (it == out.vocabulary.end()) continue;
      out.data(i, it->second) = static_cast<double>(c) * idf[it->second];
    }
  }
  normalize_rows(out.data);
  return out;
}

Matrix read_embeddings_raw(std::istream& in) {
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || std::string_view(magic.data(), magic.size()) != kEmbeddingMagic) {
    throw Error("not an AEMB1 embedding file (bad magic)");
  }
  const std::uint32_t n = read_u32_le(in);
  const std::uint32_t d = read_u32_le(in);
  if (n == 0 || d == 0) throw Error("embedding file declares an empty matrix");

  Matrix m(n, d);
  std::vector<unsigned char> buf(static_cast<std::size_t>(d) * 4);
  for (std::uint32_t r = 0; r < n; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw Error("embedding file truncated at row " + std::to_string(r));
    for (std::uint32_t c = 0; c < d; ++c) {
      const unsigned char* b = buf.data() + static_cast<std::size_t>(c) * 4;
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) {
        throw Error("non-finite value at row " + std::to_string(r) + ", column " + std::to_string(c));
      }
      m(r, c) = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("embedding file has trailing bytes");
  return m;
}

void write_embeddings(std::ostream& out, const Matrix& m) {
  out.write(kEmbeddingMagic.data(), static_cast<std::streamsize>(kEmbeddingMagic.size()));
  write_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void save_embeddings(const std::filesystem::path& path, const Matrix& m) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    write_embeddings(out, m);
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

FeatureMatrix dense_features(Matrix m) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw Error("non-finite embedding value");
  }
  normalize_rows(m);
  FeatureMatrix out;
  out.data = std::move(m);
  out.representation = Representation::kDense;
  return out;
}

FeatureMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file " + path.string());
  try {
    return dense_features(read_embeddings_raw(in));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace tgaicc
