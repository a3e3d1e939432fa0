#include "tgaicc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "parallel.hpp"
#include "tgaicc/error.hpp"
#include "tgaicc/matching.hpp"
#include "tgaicc/metrics.hpp"

namespace tgaicc {

namespace {

std::uint64_t parse_u64(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error("invalid seed '" + std::string(text) + "'");
  }
  return value;
}

void require_valid(const Corpus& corpus, const PromptSpec& prompts) {
  const auto issues = validate_corpus(corpus, prompts);
  if (!issues.empty()) {
    throw Error("corpus failed validation (" + std::to_string(issues.size()) + " issues):\n" +
                format_issues(issues));
  }
}

void require_seeds(const RunConfig& config) {
  if (config.seeds.empty()) throw Error("run config needs at least one seed");
}

std::string member_name(const std::string& prompt_id, Representation rep) {
  return prompt_id + "@" + std::string(to_string(rep));
}

FeatureMatrix featurize(std::span<const std::string> texts, Representation rep, const RunConfig& config,
                        const TextEmbedder& embedder) {
  if (rep == Representation::kTfidf) return tfidf(texts, config.tfidf);
  if (!embedder) {
    throw Error("dense representation needs embeddings: run `tgaicc embed` first or pass --embeddings DIR");
  }
  FeatureMatrix m = embedder(texts);
  if (m.rows() != texts.size()) {
    throw Error("embedder returned " + std::to_string(m.rows()) + " rows for " + std::to_string(texts.size()) +
                " texts");
  }
  return m;
}

struct Truths {
  std::vector<std::string> names;
  std::vector<Labeling> labelings;
};

Truths collect_truths(const Corpus& corpus, const PromptSpec& prompts) {
  Truths out;
  for (const auto& cat : prompts.categories()) {
    if (auto truth = corpus.truth_for(cat.name)) {
      out.names.push_back(cat.name);
      out.labelings.push_back(std::move(*truth));
    }
  }
  return out;
}

TruthScore score_against(const Labeling& output, const std::string& truth_name, const Labeling& truth) {
  return {truth_name, ari(output, truth).scaled(), ami(output, truth).scaled()};
}

void finalize_averages(EvalReport& report) {
  std::map<std::string, CellAverage> cells;
  for (const auto& run : report.runs) {
    for (const auto& cell : run.cells) {
      auto& avg = cells[cell.truth];
      avg.truth = cell.truth;
      avg.ari += cell.ari;
      avg.ami += cell.ami;
      ++avg.runs;
    }
  }
  report.averages.clear();
  // Category order, not alphabetical.
  for (const auto& name : report.categories) {
    auto it = cells.find(name);
    if (it == cells.end()) continue;
    CellAverage avg = it->second;
    avg.ari /= avg.runs;
    avg.ami /= avg.runs;
    report.averages.push_back(avg);
  }
  if (!report.averages.empty()) {
    double ari_sum = 0.0;
    double ami_sum = 0.0;
    for (const auto& a : report.averages) {
      ari_sum += a.ari;
      ami_sum += a.ami;
    }
    report.mean_ari = ari_sum / static_cast<double>(report.averages.size());
    report.mean_ami = ami_sum / static_cast<double>(report.averages.size());
  }
}

EvalReport make_report(std::string mode, const PromptSpec& prompts, const RunConfig& config) {
  EvalReport report;
  report.mode = std::move(mode);
  report.config = config;
  for (const auto& cat : prompts.categories()) report.categories.push_back(cat.name);
  return report;
}

// Unique prompt ids of the given members, sorted.
std::vector<std::string> member_prompt_ids(const Ensemble& ensemble, std::span<const int> members) {
  std::set<std::string> ids;
  for (int m : members) ids.insert(ensemble[static_cast<std::size_t>(m)].prompt_id);
  return {ids.begin(), ids.end()};
}

Explanation explain_members(const Corpus& corpus, const PromptSpec& prompts, const std::vector<std::string>& ids,
                            int z, int group_id, const RunConfig& config) {
  std::vector<std::string> texts;
  WordSet stopwords = config.stopwords;
  for (const auto& id : ids) {
    auto column = corpus.texts_for(id);
    texts.insert(texts.end(), std::make_move_iterator(column.begin()), std::make_move_iterator(column.end()));
    if (config.filter_prompt_words) {
      for (auto& token : tokenize(prompts.prompt(id).text)) stopwords.insert(std::move(token));
    }
  }
  Explanation e = explain_group(texts, z, stopwords);
  e.group_id = group_id;
  return e;
}

}  // namespace

std::string_view to_string(Aggregation a) { return a == Aggregation::kConsensus ? "consensus" : "concat"; }

std::string_view to_string(EnsembleScope s) {
  return s == EnsembleScope::kPerRepresentation ? "per-rep" : "mixed";
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "consensus") return Aggregation::kConsensus;
  if (text == "concat") return Aggregation::kConcat;
  throw Error("unknown aggregation '" + std::string(text) + "' (expected consensus|concat)");
}

EnsembleScope parse_scope(std::string_view text) {
  if (text == "per-rep" || text == "per-representation") return EnsembleScope::kPerRepresentation;
  if (text == "mixed") return EnsembleScope::kMixed;
  throw Error("unknown ensemble scope '" + std::string(text) + "' (expected per-rep|mixed)");
}

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < kDefaultSeedCount; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  return seeds;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_u64(text.substr(0, dots));
    const auto hi = parse_u64(text.substr(dots + 2));
    if (hi < lo) throw Error("empty seed range '" + std::string(text) + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    seeds.push_back(parse_u64(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

std::vector<std::string> concatenated_texts(const Corpus& corpus, std::vector<std::string> prompt_ids) {
  std::sort(prompt_ids.begin(), prompt_ids.end());
  prompt_ids.erase(std::unique(prompt_ids.begin(), prompt_ids.end()), prompt_ids.end());
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& item : corpus.items) {
    std::string joined;
    for (std::size_t p = 0; p < prompt_ids.size(); ++p) {
      if (p != 0) joined += ' ';
      auto it = item.texts.find(prompt_ids[p]);
      if (it != item.texts.end()) joined += it->second;
    }
    out.push_back(std::move(joined));
  }
  return out;
}

std::vector<int> match_outputs_to_truths(std::span<const Labeling> outputs, std::span<const Labeling> truths,
                                         bool approximate) {
  if (outputs.size() != truths.size() && !approximate) {
    throw Error("cannot match " + std::to_string(outputs.size()) + " outputs to " + std::to_string(truths.size()) +
                " ground truths");
  }
  Matrix weights(outputs.size(), truths.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    for (std::size_t j = 0; j < truths.size(); ++j) weights(i, j) = ami(outputs[i], truths[j]).value;
  }
  return max_weight_matching(weights);
}

EvalReport run_tgaicc(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                      const TextEmbedder& embedder) {
  require_valid(corpus, prompts);
  require_seeds(config);

  std::vector<Representation> reps{config.representation};
  if (config.scope == EnsembleScope::kMixed) reps = {Representation::kTfidf, Representation::kDense};

  struct Slot {
    const Prompt* prompt;
    Representation rep;
    int k;
  };
  std::vector<Slot> slots;
  for (auto rep : reps) {
    for (const auto& p : prompts.prompts()) {
      slots.push_back({&p, rep, prompts.categories()[prompts.category_index(p.category_name)].target_k});
    }
  }

  std::vector<FeatureMatrix> features(slots.size());
  detail::parallel_for(slots.size(), config.threads, [&](std::size_t i) {
    features[i] = featurize(corpus.texts_for(slots[i].prompt->prompt_id), slots[i].rep, config, embedder);
  });

  const Truths truths = collect_truths(corpus, prompts);
  EvalReport report = make_report("tgaicc", prompts, config);

  for (const std::uint64_t seed : config.seeds) {
    std::vector<EnsembleMember> members(slots.size());
    detail::parallel_for(slots.size(), config.threads, [&](std::size_t i) {
      members[i] = {slots[i].prompt->prompt_id, slots[i].rep,
                    kmeans(features[i], slots[i].k, seed, config.kmeans).labeling};
    });
    const Ensemble ensemble(std::move(members));

    GroupingResult grouping;
    if (ensemble.size() >= 2) {
      grouping = threshold_search(single_linkage(pairwise_distances(ensemble)), static_cast<int>(prompts.t()),
                                  config.strategy);
    } else {
      grouping.strategy = config.strategy;
      grouping.threshold = threshold_grid().front();
      grouping.assignment = {0};
      grouping.groups = {{0}};
      grouping.approximate = prompts.t() != 1;
    }
    const TargetAssignment targets = assign_targets(grouping, prompts, ensemble);

    SeedRun run;
    run.seed = seed;
    run.grouping = GroupingInfo{grouping.threshold, grouping.strategy, grouping.approximate, targets.votes};

    const std::size_t group_count = grouping.groups.size();
    std::vector<Labeling> outputs(group_count);
    run.outputs.resize(group_count);
    detail::parallel_for(group_count, config.threads, [&](std::size_t g) {
      const auto& indices = grouping.groups[g];
      const int k = targets.target_k[g];
      OutputRecord& rec = run.outputs[g];
      rec.group = static_cast<int>(g);
      for (int m : indices) {
        const auto& mem = ensemble[static_cast<std::size_t>(m)];
        rec.members.push_back(member_name(mem.prompt_id, mem.representation));
      }
      rec.target_category = prompts.categories()[static_cast<std::size_t>(targets.category[g])].name;
      rec.target_k = k;

      const auto ids = member_prompt_ids(ensemble, indices);
      if (config.aggregation == Aggregation::kConsensus) {
        const Ensemble group = ensemble.subset(indices);
        GroupConsensus consensus = aggregate_group_detailed(group, k, seed);
        rec.method = std::string(to_string(consensus.selected.method));
        rec.anmi = consensus.selected.anmi;
        for (const auto& f : consensus.failures) rec.failed_methods.push_back(std::string(to_string(f.method)));
        outputs[g] = std::move(consensus.selected.labeling);
      } else {
        const auto texts = concatenated_texts(corpus, ids);
        const FeatureMatrix m = featurize(texts, config.representation, config, embedder);
        rec.method = "concat";
        outputs[g] = kmeans(m, k, seed, config.kmeans).labeling;
      }
      if (config.explain) rec.explanation = explain_members(corpus, prompts, ids, k, static_cast<int>(g), config);
    });

    const bool approximate = grouping.approximate || outputs.size() != truths.labelings.size();
    const auto match = match_outputs_to_truths(outputs, truths.labelings, approximate);
    for (std::size_t g = 0; g < group_count; ++g) {
      if (match[g] < 0) continue;
      const auto j = static_cast<std::size_t>(match[g]);
      run.outputs[g].score = score_against(outputs[g], truths.names[j], truths.labelings[j]);
    }
    // Cells in category order.
    for (std::size_t j = 0; j < truths.names.size(); ++j) {
      for (std::size_t g = 0; g < group_count; ++g) {
        if (match[g] == static_cast<int>(j)) run.cells.push_back(*run.outputs[g].score);
      }
    }
    report.runs.push_back(std::move(run));
  }

  finalize_averages(report);
  return report;
}

EvalReport baseline_avg_prompt(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                               const TextEmbedder& embedder) {
  require_valid(corpus, prompts);
  require_seeds(config);
  const auto& all = prompts.prompts();

  std::vector<FeatureMatrix> features(all.size());
  detail::parallel_for(all.size(), config.threads, [&](std::size_t i) {
    features[i] = featurize(corpus.texts_for(all[i].prompt_id), config.representation, config, embedder);
  });

  EvalReport report = make_report("baseline-avg-prompt", prompts, config);
  for (const std::uint64_t seed : config.seeds) {
    SeedRun run;
    run.seed = seed;
    run.prompts.resize(all.size());
    detail::parallel_for(all.size(), config.threads, [&](std::size_t i) {
      const auto& cat = prompts.categories()[prompts.category_index(all[i].category_name)];
      const Labeling labels = kmeans(features[i], cat.target_k, seed, config.kmeans).labeling;
      PromptRecord& rec = run.prompts[i];
      rec.prompt_id = all[i].prompt_id;
      rec.category = cat.name;
      rec.representation = config.representation;
      if (auto truth = corpus.truth_for(cat.name)) rec.score = score_against(labels, cat.name, *truth);
    });
    for (const auto& cat : prompts.categories()) {
      TruthScore cell{cat.name, 0.0, 0.0};
      int count = 0;
      for (const auto& rec : run.prompts) {
        if (rec.category != cat.name || !rec.score) continue;
        cell.ari += rec.score->ari;
        cell.ami += rec.score->ami;
        ++count;
      }
      if (count == 0) continue;
      cell.ari /= count;
      cell.ami /= count;
      run.cells.push_back(cell);
    }
    report.runs.push_back(std::move(run));
  }
  finalize_averages(report);
  return report;
}

EvalReport baseline_concat_category(const Corpus& corpus, const PromptSpec& prompts, const RunConfig& config,
                                    const TextEmbedder& embedder) {
  require_valid(corpus, prompts);
  require_seeds(config);
  const auto& cats = prompts.categories();

  std::vector<FeatureMatrix> features(cats.size());
  std::vector<std::vector<std::string>> ids(cats.size());
  for (std::size_t c = 0; c < cats.size(); ++c) {
    for (const auto& p : cats[c].prompts()) ids[c].push_back(p.prompt_id);
    std::sort(ids[c].begin(), ids[c].end());
  }
  detail::parallel_for(cats.size(), config.threads, [&](std::size_t c) {
    features[c] = featurize(concatenated_texts(corpus, ids[c]), config.representation, config, embedder);
  });

  EvalReport report = make_report("baseline-concat", prompts, config);
  for (const std::uint64_t seed : config.seeds) {
    SeedRun run;
    run.seed = seed;
    run.outputs.resize(cats.size());
    detail::parallel_for(cats.size(), config.threads, [&](std::size_t c) {
      const Labeling labels = kmeans(features[c], cats[c].target_k, seed, config.kmeans).labeling;
      OutputRecord& rec = run.outputs[c];
      rec.group = static_cast<int>(c);
      for (const auto& id : ids[c]) rec.members.push_back(member_name(id, config.representation));
      rec.target_category = cats[c].name;
      rec.target_k = cats[c].target_k;
      rec.method = "concat";
      if (auto truth = corpus.truth_for(cats[c].name)) rec.score = score_against(labels, cats[c].name, *truth);
      if (config.explain) {
        rec.explanation = explain_members(corpus, prompts, ids[c], cats[c].target_k, static_cast<int>(c), config);
      }
    });
    for (const auto& rec : run.outputs) {
      if (rec.score) run.cells.push_back(*rec.score);
    }
    report.runs.push_back(std::move(run));
  }
  finalize_averages(report);
  return report;
}

}  // namespace tgaicc
