#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tgaicc/clients.hpp"
#include "tgaicc/corpus_io.hpp"
#include "tgaicc/explain.hpp"
#include "tgaicc/featurize.hpp"
#include "tgaicc/pipeline.hpp"
#include "tgaicc/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ClientFlags {
  std::string endpoint;
  std::string model;
  std::string token_env = "TGAICC_API_TOKEN";
  int concurrency = 4;
  int attempts = 3;
  int backoff_ms = 500;
  int timeout_s = 120;
  std::size_t batch = 32;
  int max_tokens = 256;
  double temperature = 0.0;

  void add_to(CLI::App& app) {
    app.add_option("--endpoint", endpoint, "Service base URL, e.g. http://localhost:8000");
    app.add_option("--model", model, "Model name sent with every request");
    app.add_option("--token-env", token_env, "Environment variable holding a bearer token")->capture_default_str();
    app.add_option("--concurrency", concurrency, "Max in-flight requests")->capture_default_str();
    app.add_option("--attempts", attempts, "Attempts per request")->capture_default_str();
    app.add_option("--backoff-ms", backoff_ms, "Initial retry backoff")->capture_default_str();
    app.add_option("--timeout", timeout_s, "Request timeout in seconds")->capture_default_str();
    app.add_option("--batch", batch, "Cells or texts per batch")->capture_default_str();
    app.add_option("--max-tokens", max_tokens)->capture_default_str();
    app.add_option("--temperature", temperature)->capture_default_str();
  }

  tgaicc::ClientConfig config() const {
    tgaicc::ClientConfig c;
    c.endpoint = endpoint;
    c.model = model;
    c.token_env = token_env;
    c.max_concurrency = concurrency;
    c.retry.max_attempts = attempts;
    c.retry.initial_backoff = std::chrono::milliseconds(backoff_ms);
    c.timeout = std::chrono::seconds(timeout_s);
    c.batch_size = batch;
    c.max_tokens = max_tokens;
    c.temperature = temperature;
    return c;
  }
};

struct RunFlags {
  std::string corpus;
  std::string prompts;
  std::string out;
  std::string rep = "tfidf";
  std::string strategy = "max";
  std::string agg = "consensus";
  std::string scope = "per-rep";
  std::string seeds = "0..9";
  std::string embeddings;
  std::string stopwords;
  int threads = 1;
  bool no_explain = false;
  bool keep_prompt_words = false;

  void add_to(CLI::App& app) {
    app.add_option("--corpus", corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    app.add_option("--prompts", prompts, "Prompt spec JSON")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out, "Report path (stdout if omitted)");
    app.add_option("--rep", rep, "tfidf | dense")->check(CLI::IsMember({"tfidf", "dense"}))->capture_default_str();
    app.add_option("--strategy", strategy, "min | max")->check(CLI::IsMember({"min", "max"}))->capture_default_str();
    app.add_option("--agg", agg, "consensus | concat")
        ->check(CLI::IsMember({"consensus", "concat"}))
        ->capture_default_str();
    app.add_option("--scope", scope, "per-rep | mixed")
        ->check(CLI::IsMember({"per-rep", "mixed"}))
        ->capture_default_str();
    app.add_option("--seeds", seeds, "Seed list: 0..9, 3 or 1,4,7")->capture_default_str();
    app.add_option("--embeddings", embeddings, "Embedding cache directory (dense runs)");
    app.add_option("--stopwords", stopwords, "Stopword file, one word per line")->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "Worker threads")->capture_default_str();
    app.add_flag("--no-explain", no_explain, "Skip word explanations");
    app.add_flag("--keep-prompt-words", keep_prompt_words, "Do not filter prompt words from explanations");
  }

  tgaicc::RunConfig config() const {
    tgaicc::RunConfig c;
    c.representation = tgaicc::parse_representation(rep);
    c.strategy = tgaicc::parse_strategy(strategy);
    c.aggregation = tgaicc::parse_aggregation(agg);
    c.scope = tgaicc::parse_scope(scope);
    c.seeds = tgaicc::parse_seeds(seeds);
    c.threads = threads;
    c.explain = !no_explain;
    c.filter_prompt_words = !keep_prompt_words;
    if (!stopwords.empty()) c.stopwords = tgaicc::load_stopwords(stopwords);
    return c;
  }

  bool needs_dense() const { return rep == "dense" || scope == "mixed"; }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw tgaicc::Error("cannot write " + tmp.string());
    f << text;
    if (!f) throw tgaicc::Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Cache-backed embedder: reads <dir>/<hash>.aemb, fetching misses when an
// endpoint is configured.
tgaicc::TextEmbedder make_embedder(const std::string& dir, const ClientFlags& client) {
  if (dir.empty()) return {};
  auto config = client.config();
  std::shared_ptr<tgaicc::Transport> transport;
  if (!config.endpoint.empty()) transport = tgaicc::make_http_transport(config, "embed");
  return [dir, config, transport](std::span<const std::string> texts) {
    return tgaicc::embed_texts(texts, transport.get(), config, fs::path(dir));
  };
}

tgaicc::Corpus load_checked(const RunFlags& flags, const tgaicc::PromptSpec& spec) {
  auto corpus = tgaicc::load_corpus(flags.corpus);
  const auto issues = tgaicc::validate_corpus(corpus, spec);
  if (!issues.empty()) throw tgaicc::Error("corpus is not ready:\n" + tgaicc::format_issues(issues));
  return corpus;
}

std::string format_scores(const tgaicc::EvalReport& report) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  for (const auto& a : report.averages) {
    s << report.mode << '\t' << a.truth << "\tARI " << a.ari << "\tAMI " << a.ami << '\n';
  }
  if (report.mean_ari && report.mean_ami) {
    s << report.mode << "\tmean\tARI " << *report.mean_ari << "\tAMI " << *report.mean_ami << '\n';
  }
  return s.str();
}

int cmd_paraphrase(const std::string& prompts_path, const std::string& out, const ClientFlags& client) {
  const auto spec = tgaicc::load_prompt_spec(prompts_path);
  auto categories = spec.categories();
  const auto config = client.config();
  std::unique_ptr<tgaicc::Transport> transport;
  for (auto& c : categories) {
    if (!c.paraphrases.empty()) continue;
    if (!transport) transport = tgaicc::make_http_transport(config, "paraphrase");
    c.paraphrases = tgaicc::paraphrase(c.initial_prompt, *transport, config);
    std::cerr << c.name << ": " << c.paraphrases.size() << " paraphrases\n";
  }
  emit(out.empty() ? prompts_path : out, tgaicc::to_json(tgaicc::PromptSpec(categories)).dump(2) + "\n");
  return 0;
}

int cmd_vqa(const std::string& corpus_path, const std::string& prompts_path, const std::string& out,
            const ClientFlags& client) {
  const auto spec = tgaicc::load_prompt_spec(prompts_path);
  const fs::path target = out.empty() ? fs::path(corpus_path) : fs::path(out);
  // Resume from the output file if an earlier run already wrote it.
  auto corpus = tgaicc::load_corpus(fs::exists(target) ? target : fs::path(corpus_path));
  const auto config = client.config();
  bool complete = true;
  for (const auto& item : corpus.items) {
    for (const auto& p : spec.prompts()) complete = complete && item.texts.count(p.prompt_id) != 0;
  }
  if (complete) {
    std::cerr << "vqa: all cells already filled\n";
    if (target != fs::path(corpus_path)) tgaicc::save_corpus_atomic(target, corpus);
    return 0;
  }
  auto transport = tgaicc::make_http_transport(config, "vqa");
  const auto stats = tgaicc::vqa_generate(corpus, spec, *transport, config, target);
  tgaicc::save_corpus_atomic(target, corpus);
  std::cerr << "vqa: filled " << stats.filled << ", skipped " << stats.skipped << ", failed "
            << stats.failures.size() << '\n';
  for (const auto& f : stats.failures) std::cerr << "  " << f.item_id << " / " << f.prompt_id << ": " << f.error << '\n';
  return stats.failures.empty() ? 0 : 3;
}

int cmd_embed(const std::string& corpus_path, const std::string& prompts_path, const std::string& dir,
              const ClientFlags& client) {
  const auto spec = tgaicc::load_prompt_spec(prompts_path);
  const auto corpus = tgaicc::load_corpus(corpus_path);
  const auto issues = tgaicc::validate_corpus(corpus, spec);
  if (!issues.empty()) throw tgaicc::Error("corpus is not ready:\n" + tgaicc::format_issues(issues));
  const auto config = client.config();
  std::unique_ptr<tgaicc::Transport> transport;
  if (!config.endpoint.empty()) transport = tgaicc::make_http_transport(config, "embed");

  // One batch per prompt column plus one per category concatenation, the
  // inputs dense runs and the concat baseline ask for.
  std::vector<std::vector<std::string>> batches;
  for (const auto& p : spec.prompts()) batches.push_back(corpus.texts_for(p.prompt_id));
  for (const auto& c : spec.categories()) {
    std::vector<std::string> ids;
    for (const auto& p : c.prompts()) ids.push_back(p.prompt_id);
    batches.push_back(tgaicc::concatenated_texts(corpus, ids));
  }
  std::size_t cached = 0;
  for (const auto& texts : batches) {
    const fs::path file = fs::path(dir) / (tgaicc::content_hash(texts, config.model) + ".aemb");
    if (fs::exists(file)) {
      ++cached;
      continue;
    }
    if (!transport) transport = tgaicc::make_http_transport(config, "embed");
    tgaicc::embed_texts(texts, transport.get(), config, fs::path(dir));
  }
  std::cerr << "embed: " << batches.size() << " batches, " << cached << " already cached\n";
  return 0;
}

int cmd_run(const RunFlags& flags, const ClientFlags& client, const std::string& mode) {
  const auto spec = tgaicc::load_prompt_spec(flags.prompts);
  const auto corpus = load_checked(flags, spec);
  const auto config = flags.config();
  const auto embedder = make_embedder(flags.embeddings, client);
  tgaicc::EvalReport report;
  if (mode == "tgaicc") {
    report = tgaicc::run_tgaicc(corpus, spec, config, embedder);
  } else if (mode == "avg-prompt") {
    report = tgaicc::baseline_avg_prompt(corpus, spec, config, embedder);
  } else {
    report = tgaicc::baseline_concat_category(corpus, spec, config, embedder);
  }
  emit(flags.out, tgaicc::serialize_report(report));
  if (!flags.out.empty()) std::cerr << format_scores(report);
  return 0;
}

int cmd_eval(const RunFlags& flags, const ClientFlags& client) {
  const auto spec = tgaicc::load_prompt_spec(flags.prompts);
  const auto corpus = load_checked(flags, spec);
  const auto config = flags.config();
  const auto embedder = make_embedder(flags.embeddings, client);
  const tgaicc::EvalReport reports[] = {
      tgaicc::baseline_avg_prompt(corpus, spec, config, embedder),
      tgaicc::baseline_concat_category(corpus, spec, config, embedder),
      tgaicc::run_tgaicc(corpus, spec, config, embedder),
  };
  json doc = {{"schema", tgaicc::kReportSchema}, {"mode", "eval"}, {"reports", json::array()}};
  std::string table;
  for (const auto& r : reports) {
    doc["reports"].push_back(tgaicc::to_json(r));
    table += format_scores(r);
  }
  emit(flags.out, doc.dump(2) + "\n");
  std::cerr << table;
  return 0;
}

int cmd_explain(const RunFlags& flags, const std::string& category, std::vector<std::string> prompt_ids, int z) {
  const auto spec = tgaicc::load_prompt_spec(flags.prompts);
  const auto corpus = tgaicc::load_corpus(flags.corpus);
  if (!category.empty()) {
    for (const auto& p : spec.categories().at(spec.category_index(category)).prompts()) {
      prompt_ids.push_back(p.prompt_id);
    }
    if (z <= 0) z = spec.categories()[spec.category_index(category)].target_k;
  }
  if (prompt_ids.empty()) throw tgaicc::Error("explain needs --category or --prompt-id");
  if (z <= 0) z = 4;
  const auto config = flags.config();
  tgaicc::WordSet stopwords = config.stopwords;
  std::vector<std::string> texts;
  for (const auto& id : std::set<std::string>(prompt_ids.begin(), prompt_ids.end())) {
    if (!spec.has_prompt(id)) throw tgaicc::Error("unknown prompt id " + id);
    auto column = corpus.texts_for(id);
    texts.insert(texts.end(), column.begin(), column.end());
    if (config.filter_prompt_words) {
      for (auto& token : tgaicc::tokenize(spec.prompt(id).text)) stopwords.insert(token);
    }
  }
  emit(flags.out, tgaicc::to_json(tgaicc::explain_group(texts, z, stopwords)).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-guided alternative consensus clustering"};
  app.require_subcommand(1);
  ClientFlags client;

  std::string prompts_path;
  std::string corpus_path;
  std::string out;
  std::string emb_dir;

  auto* para = app.add_subcommand("paraphrase", "Add three paraphrases to categories that have none");
  para->add_option("--prompts", prompts_path, "Prompt spec JSON")->required()->check(CLI::ExistingFile);
  para->add_option("--out", out, "Output prompt file (default: overwrite --prompts)");
  client.add_to(*para);

  auto* vqa = app.add_subcommand("vqa", "Fill missing (item, prompt) texts via the VQA service");
  vqa->add_option("--corpus", corpus_path, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  vqa->add_option("--prompts", prompts_path, "Prompt spec JSON")->required()->check(CLI::ExistingFile);
  vqa->add_option("--out", out, "Output corpus (default: update --corpus in place)");
  client.add_to(*vqa);

  auto* embed = app.add_subcommand("embed", "Fetch and cache dense embeddings for every prompt column");
  embed->add_option("--corpus", corpus_path, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  embed->add_option("--prompts", prompts_path, "Prompt spec JSON")->required()->check(CLI::ExistingFile);
  embed->add_option("--embeddings", emb_dir, "Cache directory")->required();
  client.add_to(*embed);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run the alternative clustering pipeline and write a report");
  run_flags.add_to(*run);
  client.add_to(*run);

  auto* baseline = app.add_subcommand("baseline", "Single-clustering baselines");
  baseline->require_subcommand(1);
  auto* avg = baseline->add_subcommand("avg-prompt", "Cluster every prompt separately, average per category");
  auto* concat = baseline->add_subcommand("concat", "Cluster concatenated texts per category");
  RunFlags avg_flags;
  RunFlags concat_flags;
  avg_flags.add_to(*avg);
  concat_flags.add_to(*concat);
  client.add_to(*avg);
  client.add_to(*concat);

  RunFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Run both baselines and the pipeline on one corpus");
  eval_flags.add_to(*eval);
  client.add_to(*eval);

  RunFlags explain_flags;
  std::string category;
  std::vector<std::string> prompt_ids;
  int z = 0;
  auto* explain = app.add_subcommand("explain", "Most frequent words over a set of prompt columns");
  explain->add_option("--corpus", explain_flags.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  explain->add_option("--prompts", explain_flags.prompts, "Prompt spec JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--out", explain_flags.out, "Output JSON (stdout if omitted)");
  explain->add_option("--category", category, "Use every prompt of this category");
  explain->add_option("--prompt-id", prompt_ids, "Prompt id (repeatable)");
  explain->add_option("-z,--top", z, "Number of words (default: the category's target k, else 4)");
  explain->add_option("--stopwords", explain_flags.stopwords, "Stopword file")->check(CLI::ExistingFile);
  explain->add_flag("--keep-prompt-words", explain_flags.keep_prompt_words);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*para) return cmd_paraphrase(prompts_path, out, client);
    if (*vqa) return cmd_vqa(corpus_path, prompts_path, out, client);
    if (*embed) return cmd_embed(corpus_path, prompts_path, emb_dir, client);
    if (*run) return cmd_run(run_flags, client, "tgaicc");
    if (*avg) return cmd_run(avg_flags, client, "avg-prompt");
    if (*concat) return cmd_run(concat_flags, client, "concat");
    if (*eval) return cmd_eval(eval_flags, client);
    if (*explain) return cmd_explain(explain_flags, category, prompt_ids, z);
  } catch (const std::exception& e) {
    std::cerr << "tgaicc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
