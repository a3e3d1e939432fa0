#include "tgaicc/clients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "parallel.hpp"
#include "tgaicc/corpus_io.hpp"

namespace tgaicc {

using nlohmann::json;

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string fold(std::string_view s) {
  std::string out = trim(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> auth_headers(const ClientConfig& config) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config.token_env.empty()) {
    if (const char* token = std::getenv(config.token_env.c_str()); token != nullptr && *token != '\0') {
      headers.emplace_back("Authorization", std::string("Bearer ") + token);
    }
  }
  return headers;
}

}  // namespace

void validate(const ClientConfig& config) {
  if (config.max_concurrency < 1) throw Error("client max_concurrency must be >= 1");
  if (config.retry.max_attempts < 1) throw Error("client retry max_attempts must be >= 1");
  if (config.batch_size < 1) throw Error("client batch_size must be >= 1");
}

json post_with_retry(Transport& transport, const ClientConfig& config, const std::string& path, const json& body) {
  validate(config);
  const HttpRequest request{path, body.dump(), auth_headers(config)};
  std::string last_error;
  auto backoff = std::chrono::duration<double, std::milli>(config.retry.initial_backoff);
  for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
    if (attempt > 1 && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= config.retry.multiplier;
    }
    HttpResponse response;
    try {
      response = transport.post(request);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (response.status >= 200 && response.status < 300) {
      try {
        return json::parse(response.body);
      } catch (const json::exception& e) {
        throw ServiceError("malformed JSON from " + path + ": " + e.what());
      }
    }
    last_error = "HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200);
    if (!retryable(response.status)) throw ServiceError(last_error);
  }
  throw ServiceError("request to " + path + " failed after " + std::to_string(config.retry.max_attempts) +
                     " attempts: " + last_error);
}

json vqa_request_body(const VqaRequest& request, const ClientConfig& config) {
  json content = json::array();
  content.push_back({{"type", "image_url"}, {"image_url", {{"url", request.image_ref}}}});
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  return {{"model", request.model.empty() ? config.model : request.model},
          {"messages", json::array({{{"role", "user"}, {"content", content}}})},
          {"max_tokens", config.max_tokens},
          {"temperature", config.temperature}};
}

json chat_request_body(const std::string& text, const ClientConfig& config) {
  return {{"model", config.model},
          {"messages", json::array({{{"role", "user"}, {"content", text}}})},
          {"max_tokens", config.max_tokens},
          {"temperature", config.temperature}};
}

std::string completion_text(const json& response) {
  try {
    const auto& content = response.at("choices").at(0).at("message").at("content");
    std::string text = content.get<std::string>();
    if (trim(text).empty()) throw ServiceError("empty completion");
    return text;
  } catch (const json::exception& e) {
    throw ServiceError(std::string("unexpected completion response: ") + e.what());
  }
}

VqaResponse vqa_request(Transport& transport, const ClientConfig& config, const VqaRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const json response = post_with_retry(transport, config, config.chat_path, vqa_request_body(request, config));
  VqaResponse out;
  out.text = trim(completion_text(response));
  out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  out.model_id = response.value("model", request.model.empty() ? config.model : request.model);
  return out;
}

VqaRunStats vqa_generate(Corpus& corpus, const PromptSpec& prompts, Transport& transport,
                         const ClientConfig& config, const std::optional<std::filesystem::path>& persist_path) {
  validate(config);
  struct Cell {
    std::size_t item;
    const Prompt* prompt;
  };
  VqaRunStats stats;
  std::vector<Cell> pending;
  for (std::size_t i = 0; i < corpus.items.size(); ++i) {
    const auto& item = corpus.items[i];
    for (const auto& p : prompts.prompts()) {
      if (item.texts.count(p.prompt_id) != 0) {
        ++stats.skipped;
        continue;
      }
      if (!item.image_ref || item.image_ref->empty()) {
        stats.failures.push_back({item.item_id, p.prompt_id, "item has no image_ref"});
        continue;
      }
      pending.push_back({i, &p});
    }
  }

  for (std::size_t begin = 0; begin < pending.size(); begin += config.batch_size) {
    const std::size_t end = std::min(pending.size(), begin + config.batch_size);
    const std::size_t count = end - begin;
    std::vector<std::optional<std::string>> texts(count);
    std::vector<std::string> errors(count);
    detail::parallel_for(count, config.max_concurrency, [&](std::size_t c) {
      const Cell& cell = pending[begin + c];
      try {
        texts[c] = vqa_request(transport, config,
                               {*corpus.items[cell.item].image_ref, cell.prompt->text, config.model})
                       .text;
      } catch (const std::exception& e) {
        errors[c] = e.what();
      }
    });
    // Single writer: merge the batch, then persist.
    for (std::size_t c = 0; c < count; ++c) {
      const Cell& cell = pending[begin + c];
      auto& item = corpus.items[cell.item];
      if (texts[c]) {
        item.texts[cell.prompt->prompt_id] = std::move(*texts[c]);
        ++stats.filled;
      } else {
        stats.failures.push_back({item.item_id, cell.prompt->prompt_id, errors[c]});
      }
    }
    if (persist_path) save_corpus_atomic(*persist_path, corpus);
  }
  return stats;
}

std::string paraphrase_request_text(const std::string& initial_question) {
  return "Generate three diverse paraphrases for the following question: " + initial_question;
}

std::vector<std::string> parse_paraphrases(const std::string& raw, const std::string& initial_question) {
  std::vector<std::string> out;
  std::vector<std::string> seen{fold(initial_question)};
  std::istringstream lines(raw);
  std::string line;
  while (std::getline(lines, line)) {
    std::string s = trim(line);
    // List markers: "1.", "1)", "(1)", "-", "*", "•".
    std::size_t pos = 0;
    if (pos < s.size() && s[pos] == '(') ++pos;
    std::size_t digits = pos;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits > pos && digits < s.size() && (s[digits] == '.' || s[digits] == ')' || s[digits] == ':')) {
      s = trim(s.substr(digits + 1));
    } else if (s.rfind("- ", 0) == 0 || s.rfind("* ", 0) == 0) {
      s = trim(s.substr(2));
    } else if (s.rfind("\xE2\x80\xA2", 0) == 0) {
      s = trim(s.substr(3));
    }
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
      s = trim(s.substr(1, s.size() - 2));
    }
    if (s.empty()) continue;
    const std::string key = fold(s);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> paraphrase(const std::string& initial_question, Transport& transport,
                                    const ClientConfig& config) {
  const json response = post_with_retry(transport, config, config.chat_path,
                                        chat_request_body(paraphrase_request_text(initial_question), config));
  const std::string raw = completion_text(response);
  auto lines = parse_paraphrases(raw, initial_question);
  if (lines.size() < 3) {
    throw ServiceError("expected 3 paraphrases, got " + std::to_string(lines.size()) + "; raw response:\n" + raw);
  }
  lines.resize(3);
  return lines;
}

std::string content_hash(std::span<const std::string> texts, std::string_view model) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
  };
  auto feed_length = [&](std::size_t len) {
    const std::string s = std::to_string(len) + ":";
    feed(s);
  };
  feed_length(model.size());
  feed(model);
  for (const auto& t : texts) {
    feed_length(t.size());
    feed(t);
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

FeatureMatrix embed_texts(std::span<const std::string> texts, Transport* transport, const ClientConfig& config,
                          const std::optional<std::filesystem::path>& cache_dir) {
  if (texts.empty()) throw Error("cannot embed an empty batch of texts");
  std::optional<std::filesystem::path> cache_file;
  if (cache_dir) {
    cache_file = *cache_dir / (content_hash(texts, config.model) + ".aemb");
    if (std::filesystem::exists(*cache_file)) {
      FeatureMatrix cached = load_embeddings(*cache_file);
      if (cached.rows() != texts.size()) throw Error("cached embeddings " + cache_file->string() + " have wrong row count");
      return cached;
    }
  }
  if (transport == nullptr) {
    throw Error("embeddings for " + std::to_string(texts.size()) +
                " texts are not cached and no endpoint is configured for the 'embed' stage");
  }
  validate(config);

  Matrix m;
  std::size_t row = 0;
  for (std::size_t begin = 0; begin < texts.size(); begin += config.batch_size) {
    const std::size_t end = std::min(texts.size(), begin + config.batch_size);
    json body = {{"model", config.model},
                 {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                                    texts.begin() + static_cast<std::ptrdiff_t>(end))}};
    const json response = post_with_retry(*transport, config, config.embeddings_path, body);
    std::vector<json> data;
    try {
      data = response.at("data").get<std::vector<json>>();
    } catch (const json::exception& e) {
      throw ServiceError(std::string("unexpected embedding response: ") + e.what());
    }
    if (data.size() != end - begin) {
      throw ServiceError("embedding response has " + std::to_string(data.size()) + " vectors for " +
                         std::to_string(end - begin) + " texts");
    }
    std::stable_sort(data.begin(), data.end(),
                     [](const json& a, const json& b) { return a.value("index", 0) < b.value("index", 0); });
    for (const auto& entry : data) {
      const auto vec = entry.at("embedding").get<std::vector<double>>();
      if (m.empty()) {
        if (vec.empty()) throw ServiceError("embedding with zero dimensions");
        m = Matrix(texts.size(), vec.size());
      }
      if (vec.size() != m.cols()) {
        throw Error("embedding dimension mismatch: got " + std::to_string(vec.size()) + ", expected " +
                    std::to_string(m.cols()));
      }
      std::copy(vec.begin(), vec.end(), m.row(row).begin());
      ++row;
    }
  }
  FeatureMatrix out = dense_features(std::move(m));
  if (cache_file) {
    std::filesystem::create_directories(cache_file->parent_path());
    save_embeddings(*cache_file, out.data);
  }
  return out;
}

}  // namespace tgaicc
