#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "styleval/align.hpp"
#include "styleval/corpus.hpp"
#include "styleval/features.hpp"
#include "styleval/jsonl.hpp"
#include "styleval/rng.hpp"

namespace styleval {

// The three classifier roles: style provenance (single headline), headline-
// headline content match, article-headline content match.
enum class Role { Main, HH, AH };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::Main: return "main";
    case Role::HH: return "hh";
    default: return "ah";
  }
}

inline Role role_from_string(std::string_view s) {
  if (s == "main") return Role::Main;
  if (s == "hh") return Role::HH;
  if (s == "ah") return Role::AH;
  throw std::runtime_error(detail::concat("unknown role \"", s, "\""));
}

// One labeled example. Main uses text_a only; HH and AH are pair roles and
// use both texts.
struct Example {
  std::string text_a;
  std::string text_b;
  std::string label;
};

struct Hyper {
  double l2 = 1e-6;
  int epochs = 5;
  double learning_rate = 0.1;  // decayed as 1/sqrt(step)
};

struct Prediction {
  std::string label;
  double probability;  // of the first label
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Sparse-featured binary logistic model. Probability is always reported for
// the first label; ties at exactly 0.5 resolve to the second label.
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(Role role, FeatureConfig config,
                   std::array<std::string, 2> labels)
      : role_(role), config_(std::move(config)), labels_(std::move(labels)) {
    config_.validate();
    weights_.assign(config_.hash_dimension, 0.0);
  }

  Role role() const { return role_; }
  const FeatureConfig& config() const { return config_; }
  const std::array<std::string, 2>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  bool trained() const { return trained_; }
  std::uint64_t seed() const { return seed_; }
  const Hyper& hyper() const { return hyper_; }

  double decision(const SparseVector& x) const {
    double z = bias_;
    for (const auto& [i, v] : x.entries) z += weights_[i] * v;
    return z;
  }

  SparseVector features(const Example& example) const {
    return role_ == Role::Main ? featurize(example.text_a, config_)
                               : featurize_pair(example.text_a, example.text_b,
                                                config_);
  }

  Prediction predict(std::string_view text) const {
    if (role_ != Role::Main) {
      throw std::runtime_error(detail::concat(
          to_string(role_), " classifier takes a text pair, not a single text"));
    }
    return predict_vector(featurize(text, config_));
  }

  Prediction predict(std::string_view text_a, std::string_view text_b) const {
    if (role_ == Role::Main) {
      throw std::runtime_error(
          "main classifier takes a single text, not a pair");
    }
    return predict_vector(featurize_pair(text_a, text_b, config_));
  }

  Prediction predict_example(const Example& example) const {
    return role_ == Role::Main ? predict(example.text_a)
                               : predict(example.text_a, example.text_b);
  }

  friend LinearClassifier train_linear(Role, std::array<std::string, 2>,
                                       const std::vector<Example>&,
                                       const FeatureConfig&, const Hyper&,
                                       std::uint64_t);
  friend LinearClassifier model_from_json(const json&);

 private:
  Prediction predict_vector(const SparseVector& x) const {
    if (!trained_) throw std::runtime_error("classifier is not trained");
    const double p = sigmoid(decision(x));
    return {p > 0.5 ? labels_[0] : labels_[1], p};
  }

  Role role_ = Role::Main;
  FeatureConfig config_;
  std::array<std::string, 2> labels_{"", ""};
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool trained_ = false;
  std::uint64_t seed_ = 0;
  Hyper hyper_;
};

// Logistic loss minimized by seeded-shuffle SGD with L2 regularization and
// 1/sqrt(t) learning-rate decay. Fully deterministic given (examples, hyper,
// seed); two runs produce bit-identical weights.
inline LinearClassifier train_linear(Role role,
                                     std::array<std::string, 2> labels,
                                     const std::vector<Example>& examples,
                                     const FeatureConfig& config,
                                     const Hyper& hyper, std::uint64_t seed) {
  if (examples.size() < 2) {
    throw std::runtime_error("train_linear: need at least 2 examples");
  }
  bool seen[2] = {false, false};
  for (const Example& e : examples) {
    if (e.label == labels[0]) {
      seen[0] = true;
    } else if (e.label == labels[1]) {
      seen[1] = true;
    } else {
      throw std::runtime_error(
          detail::concat("train_linear: unknown label \"", e.label, "\""));
    }
  }
  if (!seen[0] || !seen[1]) {
    throw std::runtime_error("train_linear: both labels must be present");
  }

  LinearClassifier clf(role, config, std::move(labels));
  clf.seed_ = seed;
  clf.hyper_ = hyper;

  // Weights are kept as scale * raw so the L2 shrink is O(1) per step.
  std::vector<double>& w = clf.weights_;
  double scale = 1.0;
  double bias = 0.0;

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Rng rng = Rng::substream(seed, "train_linear");
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      const Example& example = examples[idx];
      const SparseVector x = clf.features(example);
      ++step;
      const double lr = hyper.learning_rate / std::sqrt(double(step));

      double z = bias;
      for (const auto& [i, v] : x.entries) z += scale * w[i] * v;
      const double y = example.label == clf.labels_[0] ? 1.0 : 0.0;
      const double g = sigmoid(z) - y;

      scale *= 1.0 - lr * hyper.l2;
      if (scale < 1e-9) {
        for (double& wi : w) wi *= scale;
        scale = 1.0;
      }
      for (const auto& [i, v] : x.entries) w[i] -= lr * g * v / scale;
      bias -= lr * g;
    }
  }

  for (double& wi : w) wi *= scale;
  clf.bias_ = bias;
  clf.trained_ = true;
  return clf;
}

// ---- evaluation ----------------------------------------------------------

struct ClassifierReport {
  struct Row {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
  };
  Role role = Role::Main;
  std::vector<Row> rows;  // one per label, in label order
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t n = 0;
};

// Per-label precision/recall/F1 plus macro averages. F1 is 0 whenever
// precision + recall is 0.
inline ClassifierReport evaluate_classifier(const LinearClassifier& clf,
                                            const std::vector<Example>& test) {
  if (test.empty()) {
    throw std::runtime_error("evaluate_classifier: empty test set");
  }
  // confusion[actual][predicted], indexed by label position
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (const Example& example : test) {
    const Prediction pred = clf.predict_example(example);
    const int actual = example.label == clf.labels()[0] ? 0 : 1;
    const int predicted = pred.label == clf.labels()[0] ? 0 : 1;
    confusion[actual][predicted]++;
  }

  ClassifierReport report;
  report.role = clf.role();
  report.n = test.size();
  std::size_t correct = 0;
  for (int k = 0; k < 2; ++k) {
    const double tp = double(confusion[k][k]);
    const double fp = double(confusion[1 - k][k]);
    const double fn = double(confusion[k][1 - k]);
    ClassifierReport::Row row;
    row.label = clf.labels()[k];
    row.support = confusion[k][0] + confusion[k][1];
    row.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    row.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    row.f1 = row.precision + row.recall > 0.0
                 ? 2.0 * row.precision * row.recall /
                       (row.precision + row.recall)
                 : 0.0;
    report.rows.push_back(row);
    report.macro_precision += row.precision / 2.0;
    report.macro_recall += row.recall / 2.0;
    report.macro_f1 += row.f1 / 2.0;
    correct += confusion[k][k];
  }
  report.accuracy = double(correct) / double(test.size());
  return report;
}

// ---- external scores -----------------------------------------------------

// Externally computed per-record probabilities of the first label. Lets a
// heavyweight classifier stand in for a native one at judgment time.
class ScoreTable {
 public:
  void insert(const std::string& id, double p) {
    if (p < 0.0 || p > 1.0) {
      throw std::runtime_error(
          detail::concat("probability out of range for id \"", id, "\""));
    }
    if (!table_.emplace(id, p).second) {
      throw std::runtime_error(detail::concat("duplicate id \"", id, "\""));
    }
  }

  double at(const std::string& id) const {
    auto it = table_.find(id);
    if (it == table_.end()) {
      throw std::runtime_error(
          detail::concat("score table has no entry for id \"", id, "\""));
    }
    return it->second;
  }

  bool contains(const std::string& id) const { return table_.count(id) > 0; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, double> table_;
};

// Load {"id": string, "p": float} lines.
inline ScoreTable import_external_scores(const std::string& path) {
  ScoreTable table;
  for_each_jsonl(path, [&](std::size_t line_no, const json& record) {
    try {
      table.insert(record.at("id").get<std::string>(),
                   record.at("p").get<double>());
    } catch (const json::exception& e) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": ", e.what()));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": ", e.what()));
    }
  });
  return table;
}

// ---- training-set recipes ------------------------------------------------

inline constexpr const char* kMatchLabel = "match";
inline constexpr const char* kNoMatchLabel = "no_match";

inline std::array<std::string, 2> default_labels(Role role) {
  if (role == Role::Main) {
    return {to_string(Outlet::Left), to_string(Outlet::Right)};
  }
  return {kMatchLabel, kNoMatchLabel};
}

namespace detail {

struct SplitUniverse {
  std::vector<const NewsItem*> items;   // corpus order
  std::vector<const NewsItem*> left;    // corpus order
  std::vector<const NewsItem*> right;   // corpus order
};

// Items covered by R + A3 + A1, in corpus order (exactly the non-SA items
// when the splits partition the corpus).
inline SplitUniverse training_universe(const DatasetSplits& splits,
                                       const Corpus& corpus) {
  std::unordered_set<std::string> ids(splits.r.begin(), splits.r.end());
  for (const auto* part : {&splits.a1, &splits.a3}) {
    for (const AlignmentCandidate& c : *part) {
      ids.insert(c.left_id);
      ids.insert(c.right_id);
    }
  }
  SplitUniverse universe;
  for (const NewsItem& item : corpus.items()) {
    if (!ids.count(item.id)) continue;
    universe.items.push_back(&item);
    (item.outlet == Outlet::Left ? universe.left : universe.right)
        .push_back(&item);
  }
  return universe;
}

inline std::vector<Example> headline_pair_examples(
    const std::vector<AlignmentCandidate>& positives,
    const SplitUniverse& universe, const Corpus& corpus, Rng rng) {
  if (positives.empty()) {
    throw std::runtime_error("hh training requires aligned pairs");
  }
  std::vector<Example> examples;
  std::set<std::pair<std::string, std::string>> exclude;
  for (const AlignmentCandidate& c : positives) {
    examples.push_back({corpus.at(c.left_id).headline,
                        corpus.at(c.right_id).headline, kMatchLabel});
    exclude.emplace(c.left_id, c.right_id);
  }
  if (universe.left.empty() || universe.right.empty()) {
    throw std::runtime_error("hh negatives require items from both outlets");
  }
  // Seeded random cross-outlet pairs, excluding the aligned pairs and
  // duplicates of already sampled negatives.
  const std::size_t wanted = positives.size();
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * wanted + 1000;
  std::size_t sampled = 0;
  while (sampled < wanted) {
    if (++attempts > max_attempts) {
      throw std::runtime_error(
          "hh negatives: could not sample enough distinct random pairs");
    }
    const NewsItem* l = universe.left[rng.uniform(universe.left.size())];
    const NewsItem* r = universe.right[rng.uniform(universe.right.size())];
    if (!exclude.emplace(l->id, r->id).second) continue;
    examples.push_back({l->headline, r->headline, kNoMatchLabel});
    ++sampled;
  }
  return examples;
}

inline std::vector<Example> article_headline_examples(
    const std::vector<const NewsItem*>& items, Rng rng) {
  if (items.empty()) {
    throw std::runtime_error("ah training requires items");
  }
  if (items.size() < 2) {
    throw std::runtime_error("ah negatives require at least 2 items");
  }
  std::vector<Example> examples;
  for (const NewsItem* item : items) {
    examples.push_back({item->article, item->headline, kMatchLabel});
  }
  // One mismatched headline per article; an article is never paired with
  // its own headline.
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t j;
    do {
      j = rng.uniform(items.size());
    } while (j == i);
    examples.push_back({items[i]->article, items[j]->headline, kNoMatchLabel});
  }
  return examples;
}

}  // namespace detail

// The training recipes: Main and AH draw from R+A3+A1, HH from A1 plus an
// equal number of seeded random cross pairs. SA is never touched.
inline std::vector<Example> build_training(Role role,
                                           const DatasetSplits& splits,
                                           const Corpus& corpus,
                                           std::uint64_t seed) {
  const detail::SplitUniverse universe =
      detail::training_universe(splits, corpus);
  switch (role) {
    case Role::Main: {
      if (universe.items.empty()) {
        throw std::runtime_error("main training requires R+A3+A1 items");
      }
      std::vector<Example> examples;
      examples.reserve(universe.items.size());
      for (const NewsItem* item : universe.items) {
        examples.push_back({item->headline, "", to_string(item->outlet)});
      }
      return examples;
    }
    case Role::HH:
      return detail::headline_pair_examples(
          splits.a1, universe, corpus,
          Rng::substream(seed, "build_training/hh"));
    case Role::AH:
    default:
      return detail::article_headline_examples(
          universe.items, Rng::substream(seed, "build_training/ah"));
  }
}

// Gold evaluation sets: the same recipes applied to the held-out SA pairs.
inline std::vector<Example> build_gold_eval(Role role,
                                            const DatasetSplits& splits,
                                            const Corpus& corpus,
                                            std::uint64_t seed) {
  if (splits.sa.empty()) {
    throw std::runtime_error("gold evaluation requires a nonempty SA split");
  }
  detail::SplitUniverse sa;
  std::unordered_set<std::string> ids;
  for (const AlignmentCandidate& c : splits.sa) {
    ids.insert(c.left_id);
    ids.insert(c.right_id);
  }
  for (const NewsItem& item : corpus.items()) {
    if (!ids.count(item.id)) continue;
    sa.items.push_back(&item);
    (item.outlet == Outlet::Left ? sa.left : sa.right).push_back(&item);
  }
  switch (role) {
    case Role::Main: {
      std::vector<Example> examples;
      for (const NewsItem* item : sa.items) {
        examples.push_back({item->headline, "", to_string(item->outlet)});
      }
      return examples;
    }
    case Role::HH:
      return detail::headline_pair_examples(
          splits.sa, sa, corpus, Rng::substream(seed, "gold_eval/hh"));
    case Role::AH:
    default:
      return detail::article_headline_examples(
          sa.items, Rng::substream(seed, "gold_eval/ah"));
  }
}

// ---- model serialization ---------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(concat("bad float \"", s, "\""));
  }
  return v;
}

}  // namespace detail

inline constexpr int kModelFormatVersion = 1;

// Versioned model document. Weights are stored as "index:value" with
// shortest round-trip float formatting, so save -> load -> predict is
// bit-exact.
inline json model_to_json(const LinearClassifier& clf) {
  if (!clf.trained()) {
    throw std::runtime_error("cannot serialize an untrained classifier");
  }
  json weights = json::array();
  for (std::uint32_t i = 0; i < clf.weights().size(); ++i) {
    if (clf.weights()[i] != 0.0) {
      weights.push_back(
          detail::concat(i, ":", detail::format_double(clf.weights()[i])));
    }
  }
  const FeatureConfig& fc = clf.config();
  return json{
      {"version", kModelFormatVersion},
      {"role", to_string(clf.role())},
      {"labels", clf.labels()},
      {"feature_config",
       {{"char_ngram_range", {fc.char_ngram_lo, fc.char_ngram_hi}},
        {"word_ngram_range", {fc.word_ngram_lo, fc.word_ngram_hi}},
        {"hash_dimension", fc.hash_dimension},
        {"lowercase", fc.lowercase},
        {"pair_overlap_features", fc.pair_overlap_features}}},
      {"bias", detail::format_double(clf.bias())},
      {"weights", std::move(weights)},
      {"training_provenance",
       {{"seed", clf.seed()},
        {"l2", clf.hyper().l2},
        {"epochs", clf.hyper().epochs},
        {"learning_rate", clf.hyper().learning_rate}}}};
}

inline LinearClassifier model_from_json(const json& doc) {
  if (doc.at("version").get<int>() != kModelFormatVersion) {
    throw std::runtime_error("unsupported model format version");
  }
  FeatureConfig fc;
  const json& fcj = doc.at("feature_config");
  fc.char_ngram_lo = fcj.at("char_ngram_range").at(0).get<int>();
  fc.char_ngram_hi = fcj.at("char_ngram_range").at(1).get<int>();
  fc.word_ngram_lo = fcj.at("word_ngram_range").at(0).get<int>();
  fc.word_ngram_hi = fcj.at("word_ngram_range").at(1).get<int>();
  fc.hash_dimension = fcj.at("hash_dimension").get<std::uint32_t>();
  fc.lowercase = fcj.at("lowercase").get<bool>();
  fc.pair_overlap_features = fcj.at("pair_overlap_features").get<bool>();

  const auto labels = doc.at("labels").get<std::vector<std::string>>();
  if (labels.size() != 2) throw std::runtime_error("model needs two labels");

  LinearClassifier clf(role_from_string(doc.at("role").get<std::string>()),
                       fc, {labels[0], labels[1]});
  clf.bias_ = detail::parse_double(doc.at("bias").get<std::string>());
  for (const json& entry : doc.at("weights")) {
    const std::string s = entry.get<std::string>();
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error(detail::concat("bad weight entry \"", s, "\""));
    }
    const unsigned long index = std::stoul(s.substr(0, colon));
    if (index >= clf.weights_.size()) {
      throw std::runtime_error(
          detail::concat("weight index out of range in \"", s, "\""));
    }
    clf.weights_[index] = detail::parse_double(s.substr(colon + 1));
  }
  const json& prov = doc.at("training_provenance");
  clf.seed_ = prov.at("seed").get<std::uint64_t>();
  clf.hyper_.l2 = prov.at("l2").get<double>();
  clf.hyper_.epochs = prov.at("epochs").get<int>();
  clf.hyper_.learning_rate = prov.at("learning_rate").get<double>();
  clf.trained_ = true;
  return clf;
}

inline void save_model(const LinearClassifier& clf, const std::string& path) {
  write_json_file(path, model_to_json(clf));
}

inline LinearClassifier load_model(const std::string& path) {
  return model_from_json(read_json_file(path));
}

}  // namespace styleval
