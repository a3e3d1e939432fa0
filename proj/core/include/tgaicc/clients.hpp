#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgaicc/core_model.hpp"
#include "tgaicc/error.hpp"
#include "tgaicc/featurize.hpp"

namespace tgaicc {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
};

struct ClientConfig {
  std::string endpoint;  // base URL, e.g. "http://localhost:8000"; empty = offline
  std::string chat_path = "/v1/chat/completions";
  std::string embeddings_path = "/v1/embeddings";
  std::string model;
  std::string token_env = "TGAICC_API_TOKEN";  // bearer token source, if set
  int max_concurrency = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  double temperature = 0.0;
  int max_tokens = 256;
  std::size_t batch_size = 32;
};

// Throws Error if max_concurrency < 1, max_attempts < 1 or batch_size < 1.
void validate(const ClientConfig& config);

struct HttpRequest {
  std::string path;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Connection-level failure (refused, timed out, reset).
class TransportError : public Error {
 public:
  using Error::Error;
};

// Non-retryable HTTP status or malformed response body.
class ServiceError : public Error {
 public:
  using Error::Error;
};

// POSTs JSON bodies. Implementations must be safe to call concurrently.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

// cpp-httplib transport for `config.endpoint`. With no endpoint configured
// this fails immediately, naming `stage`.
std::unique_ptr<Transport> make_http_transport(const ClientConfig& config, std::string_view stage);

// POSTs `body` to `path` under the retry policy: connection errors, 429 and
// 5xx are retried with exponential backoff, other non-2xx fail at once.
// Returns the parsed response.
nlohmann::json post_with_retry(Transport& transport, const ClientConfig& config, const std::string& path,
                               const nlohmann::json& body);

struct VqaRequest {
  std::string image_ref;
  std::string prompt;
  std::string model;
};

struct VqaResponse {
  std::string text;
  std::chrono::milliseconds latency{0};
  std::string model_id;
};

// Chat-completion style body: the image is forwarded as an image_url part,
// followed by the prompt as a text part.
nlohmann::json vqa_request_body(const VqaRequest& request, const ClientConfig& config);
nlohmann::json chat_request_body(const std::string& text, const ClientConfig& config);

// choices[0].message.content; throws ServiceError if absent or empty.
std::string completion_text(const nlohmann::json& response);

VqaResponse vqa_request(Transport& transport, const ClientConfig& config, const VqaRequest& request);

struct CellFailure {
  std::string item_id;
  std::string prompt_id;
  std::string error;
};

struct VqaRunStats {
  std::size_t filled = 0;
  std::size_t skipped = 0;  // cells that already had text
  std::vector<CellFailure> failures;
};

/// Fills texts[prompt_id] for every (item, prompt) cell that is still missing.
///
/// Cells are processed in batches of `config.batch_size` with at most
/// `config.max_concurrency` requests in flight. After each batch the results
/// are merged into `corpus` and, if `persist_path` is set, the corpus is
/// written there atomically, so an interrupted run resumes where it stopped.
/// Failed cells are reported and left empty.
VqaRunStats vqa_generate(Corpus& corpus, const PromptSpec& prompts, Transport& transport,
                         const ClientConfig& config,
                         const std::optional<std::filesystem::path>& persist_path = std::nullopt);

std::string paraphrase_request_text(const std::string& initial_question);

// Splits a paraphrase response into lines, strips list markers and quotes,
// and drops copies of the initial question and of earlier lines.
std::vector<std::string> parse_paraphrases(const std::string& raw, const std::string& initial_question);

// Asks for three paraphrases of `initial_question`. Throws ServiceError
// carrying the raw response if fewer than three usable lines come back.
std::vector<std::string> paraphrase(const std::string& initial_question, Transport& transport,
                                    const ClientConfig& config);

// FNV-1a 64 over the model name and length-prefixed texts, as 16 hex digits.
std::string content_hash(std::span<const std::string> texts, std::string_view model = {});

/// Dense embeddings for `texts`, one L2-normalized row per text.
///
/// With `cache_dir`, the result is looked up as <cache_dir>/<hash>.aemb and
/// written there after a fetch. `transport` may be null for cache-only use;
/// a miss then fails, naming the embed stage.
FeatureMatrix embed_texts(std::span<const std::string> texts, Transport* transport, const ClientConfig& config,
                          const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace tgaicc
