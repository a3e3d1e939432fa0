#include "tgaicc/report.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "tgaicc/error.hpp"

namespace tgaicc {

using nlohmann::json;

namespace {

json score_json(const TruthScore& s) { return {{"truth", s.truth}, {"ari", s.ari}, {"ami", s.ami}}; }

json optional_score(const std::optional<TruthScore>& s) { return s ? score_json(*s) : json(nullptr); }

json config_json(const RunConfig& c) {
  return {{"representation", to_string(c.representation)},
          {"strategy", to_string(c.strategy)},
          {"aggregation", to_string(c.aggregation)},
          {"scope", to_string(c.scope)},
          {"seeds", c.seeds},
          {"kmeans", {{"max_iter", c.kmeans.max_iter}, {"tol", c.kmeans.tol}, {"n_init", 1}}},
          {"tfidf", {{"min_df", c.tfidf.min_df}}},
          {"explain", c.explain},
          {"filter_prompt_words", c.filter_prompt_words}};
}

}  // namespace

json to_json(const Explanation& e) {
  json words = json::array();
  for (const auto& w : e.words) words.push_back({{"word", w.word}, {"count", w.count}});
  return {{"group", e.group_id}, {"z", e.z}, {"words", words}, {"short", e.short_result}};
}

json to_json(const EvalReport& report) {
  json runs = json::array();
  for (const auto& run : report.runs) {
    json r;
    r["seed"] = run.seed;
    if (run.grouping) {
      r["grouping"] = {{"threshold", run.grouping->threshold},
                       {"strategy", to_string(run.grouping->strategy)},
                       {"approximate", run.grouping->approximate},
                       {"votes", run.grouping->votes}};
    }
    json outputs = json::array();
    for (const auto& o : run.outputs) {
      json out = {{"group", o.group},
                  {"members", o.members},
                  {"target_category", o.target_category},
                  {"target_k", o.target_k},
                  {"method", o.method},
                  {"score", optional_score(o.score)}};
      if (o.anmi) out["anmi"] = *o.anmi;
      if (!o.failed_methods.empty()) out["failed_methods"] = o.failed_methods;
      if (o.explanation) out["explanation"] = to_json(*o.explanation);
      outputs.push_back(std::move(out));
    }
    r["outputs"] = std::move(outputs);
    if (!run.prompts.empty()) {
      json prompts = json::array();
      for (const auto& p : run.prompts) {
        prompts.push_back({{"prompt_id", p.prompt_id},
                           {"category", p.category},
                           {"representation", to_string(p.representation)},
                           {"score", optional_score(p.score)}});
      }
      r["prompts"] = std::move(prompts);
    }
    json cells = json::array();
    for (const auto& c : run.cells) cells.push_back(score_json(c));
    r["cells"] = std::move(cells);
    runs.push_back(std::move(r));
  }

  json averages = json::array();
  for (const auto& a : report.averages) {
    averages.push_back({{"truth", a.truth}, {"ari", a.ari}, {"ami", a.ami}, {"runs", a.runs}});
  }

  json doc;
  doc["schema"] = kReportSchema;
  doc["mode"] = report.mode;
  doc["scale"] = 100;
  doc["config"] = config_json(report.config);
  doc["categories"] = report.categories;
  doc["runs"] = std::move(runs);
  doc["averages"] = std::move(averages);
  doc["mean"] = {{"ari", report.mean_ari ? json(*report.mean_ari) : json(nullptr)},
                 {"ami", report.mean_ami ? json(*report.mean_ami) : json(nullptr)}};
  return doc;
}

std::string serialize_report(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

void save_report(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report " + path.string());
  out << serialize_report(report);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace tgaicc
