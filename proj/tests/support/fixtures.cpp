#include "fixtures.hpp"

#include <set>
#include <sstream>

namespace fixture {

const std::vector<std::string> kSuits = {"heart", "diamond", "club", "spade"};
const std::vector<std::string> kRanks = {"ace", "two", "three", "four",  "five",  "six",  "seven",
                                         "eight", "nine", "ten", "jack", "queen", "king"};

namespace {

// Answer template per question; {} marks the class word. Templates use only
// prompt words, stopwords and the class word, so the class word dominates
// the word counts. Concise answers are the class word alone.
const std::vector<std::string> kRankTemplates = {
    "the rank of the card shown in the picture is {}",
    "the face value of the card displayed is {}",
    "the card in the photo holds the position of {}",
};
const std::vector<std::string> kSuitTemplates = {
    "the suit of the playing card shown in the picture is {}",
    "the playing card in the image belongs to {}",
    "the suit of the card depicted in the photo is {}",
};

std::string fill(const std::string& tmpl, const std::string& word) {
  std::string out = tmpl;
  out.replace(out.find("{}"), 2, word);
  return out;
}

// Every word any answer can contain: template words and class words.
const std::vector<std::string>& answer_vocabulary() {
  static const std::vector<std::string> words = [] {
    std::set<std::string> all;
    for (const auto* list : {&kRankTemplates, &kSuitTemplates}) {
      for (const auto& t : *list) {
        std::istringstream in(t);
        std::string w;
        while (in >> w) {
          if (w != "{}") all.insert(w);
        }
      }
    }
    for (const auto& r : kRanks) all.insert(r);
    for (const auto& s : kSuits) all.insert(s + "s");
    return std::vector<std::string>(all.begin(), all.end());
  }();
  return words;
}

// Replaces each token, with probability `noise`, by a uniformly drawn
// answer-vocabulary word.
std::string add_noise(tgaicc::Rng& rng, const std::string& text, double noise) {
  const auto& vocab = answer_vocabulary();
  std::istringstream in(text);
  std::string token;
  std::string out;
  while (in >> token) {
    if (rng.uniform() < noise) token = vocab[rng.below(vocab.size())];
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

}  // namespace

std::vector<int> random_labels(tgaicc::Rng& rng, std::size_t n, int k) {
  std::vector<int> out(n);
  for (auto& x : out) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return out;
}

std::vector<int> random_partition(tgaicc::Rng& rng, std::size_t n, int k) {
  std::vector<int> out = random_labels(rng, n, k);
  // Fisher-Yates: the first k slots of a random permutation get 0..k-1.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (int c = 0; c < k; ++c) out[order[static_cast<std::size_t>(c)]] = c;
  return out;
}

Blobs two_blobs(std::uint64_t seed, std::size_t per_blob, std::size_t dims) {
  tgaicc::Rng rng(seed);
  Blobs b{tgaicc::Matrix(2 * per_blob, dims), {}};
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const int label = static_cast<int>(i % 2);
    b.labels.push_back(label);
    for (std::size_t d = 0; d < dims; ++d) b.points(i, d) = 10.0 * label + 0.1 * rng.normal();
  }
  return b;
}

std::vector<std::vector<double>> random_distances(tgaicc::Rng& rng, std::size_t m) {
  std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) d[i][j] = d[j][i] = rng.uniform();
  }
  return d;
}

tgaicc::DistanceMatrix to_condensed(const std::vector<std::vector<double>>& d) {
  tgaicc::DistanceMatrix out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) out.set(i, j, d[i][j]);
  }
  return out;
}

tgaicc::DistanceMatrix two_block(std::size_t m, double intra, double inter) {
  tgaicc::DistanceMatrix out(m);
  const std::size_t half = m / 2;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) out.set(i, j, (i < half) == (j < half) ? intra : inter);
  }
  return out;
}

Cards cards(std::uint64_t seed, int variants, double noise) {
  std::vector<tgaicc::Category> cats(2);
  cats[0].name = "rank";
  cats[0].target_k = 13;
  cats[0].initial_prompt = "Can you tell me the rank of the card shown in the picture?";
  cats[0].paraphrases = {"What is the numerical or face value of the card displayed in the image?",
                         "What level or position does the card in the photo hold?"};
  cats[1].name = "suit";
  cats[1].target_k = 4;
  cats[1].initial_prompt = "Can you tell me the suit of the playing card shown in the picture?";
  cats[1].paraphrases = {"What suit does the playing card in the image belong to?",
                         "Could you identify the suit of the playing card depicted in the photo?"};
  Cards out{{}, tgaicc::PromptSpec(cats)};

  tgaicc::Rng rng(seed);
  for (std::size_t r = 0; r < kRanks.size(); ++r) {
    for (std::size_t s = 0; s < kSuits.size(); ++s) {
      for (int v = 0; v < variants; ++v) {
        tgaicc::ItemRecord item;
        item.item_id = kRanks[r] + "-" + kSuits[s] + "-" + std::to_string(v);
        item.image_ref = "cards/" + item.item_id + ".png";
        item.truth_labels["rank"] = kRanks[r];
        item.truth_labels["suit"] = kSuits[s];
        for (const auto& p : out.prompts.prompts()) {
          const bool is_rank = p.category_name == "rank";
          // Question index from the "<category>.q<j>" id.
          const auto q = static_cast<std::size_t>(p.prompt_id[p.prompt_id.find(".q") + 2] - '0');
          const std::string word = is_rank ? kRanks[r] : kSuits[s] + "s";
          const std::string text = p.concise ? word : fill((is_rank ? kRankTemplates : kSuitTemplates)[q], word);
          item.texts[p.prompt_id] = add_noise(rng, text, noise);
        }
        out.corpus.items.push_back(std::move(item));
      }
    }
  }
  return out;
}

}  // namespace fixture
