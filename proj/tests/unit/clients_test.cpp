#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "mock_transport.hpp"
#include "tgaicc/clients.hpp"
#include "tgaicc/corpus_io.hpp"
#include "tgaicc/error.hpp"

using namespace tgaicc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ClientConfig fast_config() {
  ClientConfig c;
  c.model = "test-model";
  c.retry.initial_backoff = std::chrono::milliseconds(0);
  return c;
}

// Echoes the question so every cell gets a distinct answer.
HttpResponse echo(const HttpRequest& req, int) {
  const auto body = json::parse(req.body);
  return fixture::chat_reply("answer to " + body["messages"][0]["content"][1]["text"].get<std::string>());
}

HttpResponse embedding_reply(const std::vector<std::vector<double>>& rows, bool reversed = false) {
  json data = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t j = reversed ? rows.size() - 1 - i : i;
    data.push_back({{"index", j}, {"embedding", rows[j]}});
  }
  return {200, json{{"data", data}}.dump()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tgaicc_clients_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ClientConfig, Validation) {
  ClientConfig c;
  EXPECT_NO_THROW(validate(c));
  c.max_concurrency = 0;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.retry.max_attempts = 0;
  EXPECT_THROW(validate(c), Error);
}

TEST(Retry, TransientFailuresThenSuccess) {
  fixture::MockTransport t([](const HttpRequest&, int call) {
    if (call == 0) throw TransportError("connection reset");
    if (call == 1) return HttpResponse{429, "slow down"};
    return fixture::chat_reply("ok");
  });
  const auto response = post_with_retry(t, fast_config(), "/v1/chat/completions", json::object());
  EXPECT_EQ(completion_text(response), "ok");
  EXPECT_EQ(t.calls(), 3u);
}

TEST(Retry, ClientErrorIsNotRetried) {
  fixture::MockTransport t([](const HttpRequest&, int) { return HttpResponse{400, "bad"}; });
  EXPECT_THROW(post_with_retry(t, fast_config(), "/x", json::object()), ServiceError);
  EXPECT_EQ(t.calls(), 1u);
  fixture::MockTransport down([](const HttpRequest&, int) { return HttpResponse{503, "down"}; });
  EXPECT_THROW(post_with_retry(down, fast_config(), "/x", json::object()), ServiceError);
  EXPECT_EQ(down.calls(), 3u);
}

TEST(Retry, BearerTokenFromEnvironment) {
  ::setenv("TGAICC_TEST_TOKEN", "s3cret", 1);
  auto cfg = fast_config();
  cfg.token_env = "TGAICC_TEST_TOKEN";
  fixture::MockTransport t([](const HttpRequest&, int) { return fixture::chat_reply("ok"); });
  post_with_retry(t, cfg, "/x", json::object());
  ::unsetenv("TGAICC_TEST_TOKEN");
  const auto req = t.requests().at(0);
  const auto auth = std::find_if(req.headers.begin(), req.headers.end(),
                                 [](const auto& h) { return h.first == "Authorization"; });
  ASSERT_NE(auth, req.headers.end());
  EXPECT_EQ(auth->second, "Bearer s3cret");
}

TEST(Vqa, FillsEveryCellOnce) {
  auto cards = fixture::cards(11, 1);
  for (auto& item : cards.corpus.items) item.texts.clear();
  fixture::MockTransport t(echo);
  const auto stats = vqa_generate(cards.corpus, cards.prompts, t, fast_config(), std::nullopt);
  const std::size_t cells = cards.corpus.size() * cards.prompts.prompts().size();
  EXPECT_EQ(t.calls(), cells);
  EXPECT_EQ(stats.filled, cells);
  EXPECT_TRUE(stats.failures.empty());
  EXPECT_TRUE(validate_corpus(cards.corpus, cards.prompts).empty());
  const auto& item = cards.corpus.items[5];
  for (const auto& p : cards.prompts.prompts()) EXPECT_EQ(item.texts.at(p.prompt_id), "answer to " + p.text);
  const auto body = json::parse(t.requests()[0].body);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["messages"][0]["content"][0]["type"], "image_url");
}

TEST(Vqa, CompleteCorpusIssuesNoRequests) {
  auto cards = fixture::cards(12, 1);
  fixture::MockTransport t(echo);
  const auto stats = vqa_generate(cards.corpus, cards.prompts, t, fast_config(), std::nullopt);
  EXPECT_EQ(t.calls(), 0u);
  EXPECT_EQ(stats.filled, 0u);
}

TEST(Vqa, FailuresAreRecordedAndPersistedCellsSurvive) {
  auto cards = fixture::cards(13, 1);
  for (auto& item : cards.corpus.items) item.texts.clear();
  cards.corpus.items[0].image_ref.reset();
  const auto dir = scratch("vqa");
  fixture::MockTransport t([](const HttpRequest& req, int) {
    if (req.body.find("suit") != std::string::npos) return HttpResponse{400, "refused"};
    return echo(req, 0);
  });
  const auto stats = vqa_generate(cards.corpus, cards.prompts, t, fast_config(), dir / "c.jsonl");
  EXPECT_FALSE(stats.failures.empty());
  for (const auto& f : stats.failures) {
    EXPECT_TRUE(f.item_id == cards.corpus.items[0].item_id || f.prompt_id.rfind("suit", 0) == 0) << f.prompt_id;
  }
  const auto reloaded = load_corpus(dir / "c.jsonl");
  EXPECT_EQ(reloaded.items.size(), cards.corpus.size());
  EXPECT_EQ(reloaded.items[1].texts, cards.corpus.items[1].texts);
  fs::remove_all(dir);
}

TEST(Paraphrase, ParsesNumberedBulletedAndQuoted) {
  const std::string raw = "1. What suit is shown?\n- \"Which suit is on the card?\"\n\n* what SUIT is this card?\n"
                          "(4) Which suit does the card show?";
  const auto lines = parse_paraphrases(raw, "What suit is this card?");
  EXPECT_EQ(lines, (std::vector<std::string>{"What suit is shown?", "Which suit is on the card?",
                                             "Which suit does the card show?"}));
}

TEST(Paraphrase, RequestTemplateAndErrors) {
  EXPECT_EQ(paraphrase_request_text("Q?"), "Generate three diverse paraphrases for the following question: Q?");
  fixture::MockTransport good([](const HttpRequest&, int) { return fixture::chat_reply("a\nb\nc\nd"); });
  EXPECT_EQ(paraphrase("Q?", good, fast_config()), (std::vector<std::string>{"a", "b", "c"}));
  fixture::MockTransport bad([](const HttpRequest&, int) { return fixture::chat_reply("only one"); });
  try {
    paraphrase("Q?", bad, fast_config());
    FAIL() << "expected an error";
  } catch (const ServiceError& e) {
    EXPECT_NE(std::string(e.what()).find("only one"), std::string::npos);
  }
}

TEST(Embed, OrdersByIndexAndNormalizes) {
  const std::vector<std::string> texts{"a", "b", "c"};
  fixture::MockTransport t([](const HttpRequest&, int) {
    return embedding_reply({{2, 0}, {0, 3}, {1, 1}}, true);
  });
  const auto m = embed_texts(texts, &t, fast_config(), std::nullopt);
  EXPECT_EQ(m.representation, Representation::kDense);
  EXPECT_EQ(m.data(0, 0), 1.0);
  EXPECT_EQ(m.data(1, 1), 1.0);
  EXPECT_NEAR(m.data(2, 0), std::sqrt(0.5), 1e-15);
}

TEST(Embed, CacheHitSkipsTheService) {
  const auto dir = scratch("embed");
  const std::vector<std::string> texts{"x", "y"};
  fixture::MockTransport t([](const HttpRequest&, int) { return embedding_reply({{1, 0}, {0, 1}}); });
  const auto first = embed_texts(texts, &t, fast_config(), dir);
  EXPECT_TRUE(fs::exists(dir / (content_hash(texts, "test-model") + ".aemb")));
  const auto second = embed_texts(texts, nullptr, fast_config(), dir);
  EXPECT_EQ(t.calls(), 1u);
  EXPECT_EQ(first.data, second.data);
  fs::remove_all(dir);
}

TEST(Embed, Errors) {
  const std::vector<std::string> none;
  EXPECT_THROW(embed_texts(none, nullptr, fast_config(), std::nullopt), Error);
  const std::vector<std::string> texts{"x", "y"};
  try {
    embed_texts(texts, nullptr, fast_config(), std::nullopt);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'embed'"), std::string::npos);
  }
  fixture::MockTransport ragged([](const HttpRequest&, int) { return embedding_reply({{1, 0}, {0, 1, 2}}); });
  EXPECT_THROW(embed_texts(texts, &ragged, fast_config(), std::nullopt), Error);
}

TEST(ContentHash, SensitiveToBoundariesAndModel) {
  const std::vector<std::string> a{"ab", "c"};
  const std::vector<std::string> b{"a", "bc"};
  EXPECT_NE(content_hash(a, "m"), content_hash(b, "m"));
  EXPECT_NE(content_hash(a, "m"), content_hash(a, "n"));
  EXPECT_EQ(content_hash(a, "m").size(), 16u);
}

TEST(HttpTransport, MissingEndpointNamesTheStage) {
  ClientConfig c;
  try {
    make_http_transport(c, "vqa");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'vqa'"), std::string::npos);
  }
}
