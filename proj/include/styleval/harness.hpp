#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "styleval/align.hpp"
#include "styleval/classifier.hpp"
#include "styleval/corpus.hpp"
#include "styleval/metrics.hpp"
#include "styleval/rng.hpp"
#include "styleval/text.hpp"

namespace styleval {

enum class Direction { LeftToRight, RightToLeft };

inline const char* to_string(Direction d) {
  return d == Direction::LeftToRight ? "l2r" : "r2l";
}

inline Direction direction_from_string(std::string_view s) {
  if (s == "l2r") return Direction::LeftToRight;
  if (s == "r2l") return Direction::RightToLeft;
  throw std::runtime_error(detail::concat("unknown direction \"", s, "\""));
}

// One system output under judgment.
struct TransferRecord {
  std::string id;
  Direction direction = Direction::LeftToRight;
  std::string original_headline;
  std::string generated_headline;
  std::string source_article;
  std::optional<std::string> reference_headline;  // aligned counterpart
};

inline std::vector<TransferRecord> load_transfer_records(
    const std::string& path) {
  std::vector<TransferRecord> records;
  for_each_jsonl(path, [&](std::size_t line_no, const json& record) {
    const std::string where = detail::concat(path, ":", line_no);
    TransferRecord r;
    try {
      r.id = record.at("id").get<std::string>();
      r.direction =
          direction_from_string(record.at("direction").get<std::string>());
      r.original_headline = record.at("original").get<std::string>();
      r.generated_headline = record.at("generated").get<std::string>();
      r.source_article = record.at("article").get<std::string>();
      if (record.contains("reference")) {
        r.reference_headline = record.at("reference").get<std::string>();
      }
    } catch (const json::exception& e) {
      throw std::runtime_error(detail::concat(where, ": ", e.what()));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(detail::concat(where, ": ", e.what()));
    }
    if (r.original_headline.empty() || r.generated_headline.empty()) {
      throw std::runtime_error(
          detail::concat(where, ": original and generated must be nonempty"));
    }
    records.push_back(std::move(r));
  });
  return records;
}

inline void save_transfer_records(const std::vector<TransferRecord>& records,
                                  const std::string& path) {
  auto out = open_output(path);
  for (const TransferRecord& r : records) {
    json doc{{"id", r.id},
             {"direction", to_string(r.direction)},
             {"original", r.original_headline},
             {"generated", r.generated_headline},
             {"article", r.source_article}};
    if (r.reference_headline) doc["reference"] = *r.reference_headline;
    out << doc.dump() << '\n';
  }
}

// ---- judges ----------------------------------------------------------------

// Style-provenance judge: labels both headlines of a record.
class StyleJudge {
 public:
  virtual ~StyleJudge() = default;
  virtual std::string label_original(const TransferRecord& r) const = 0;
  virtual std::string label_generated(const TransferRecord& r) const = 0;
  virtual std::string provenance() const = 0;
};

// Content-match judge for one of the pair roles.
class MatchJudge {
 public:
  virtual ~MatchJudge() = default;
  virtual bool match(const TransferRecord& r) const = 0;
  virtual std::string provenance() const = 0;
};

class NativeStyleJudge : public StyleJudge {
 public:
  explicit NativeStyleJudge(const LinearClassifier& clf) : clf_(&clf) {
    if (clf.role() != Role::Main) {
      throw std::runtime_error("style judge requires a main-role classifier");
    }
    if (!clf.trained()) throw std::runtime_error("untrained main classifier");
  }
  std::string label_original(const TransferRecord& r) const override {
    return clf_->predict(r.original_headline).label;
  }
  std::string label_generated(const TransferRecord& r) const override {
    return clf_->predict(r.generated_headline).label;
  }
  std::string provenance() const override { return "native:main"; }

 private:
  const LinearClassifier* clf_;
};

// Externally scored style judge. Reversal needs the main decision on both
// headlines, so this takes two tables: probabilities of the first label
// ("left") on the original and on the generated headline, keyed by record
// id.
class ScoreStyleJudge : public StyleJudge {
 public:
  ScoreStyleJudge(ScoreTable original, ScoreTable generated,
                  std::array<std::string, 2> labels = {"left", "right"})
      : original_(std::move(original)),
        generated_(std::move(generated)),
        labels_(std::move(labels)) {}
  std::string label_original(const TransferRecord& r) const override {
    return original_.at(r.id) > 0.5 ? labels_[0] : labels_[1];
  }
  std::string label_generated(const TransferRecord& r) const override {
    return generated_.at(r.id) > 0.5 ? labels_[0] : labels_[1];
  }
  std::string provenance() const override { return "scores:main"; }

 private:
  ScoreTable original_;
  ScoreTable generated_;
  std::array<std::string, 2> labels_;
};

class NativeMatchJudge : public MatchJudge {
 public:
  NativeMatchJudge(const LinearClassifier& clf) : clf_(&clf) {
    if (clf.role() == Role::Main) {
      throw std::runtime_error("match judge requires an hh or ah classifier");
    }
    if (!clf.trained()) throw std::runtime_error("untrained match classifier");
    if (clf.labels()[0] != kMatchLabel) {
      throw std::runtime_error("match classifier must have \"match\" first");
    }
  }
  bool match(const TransferRecord& r) const override {
    const Prediction p =
        clf_->role() == Role::HH
            ? clf_->predict(r.original_headline, r.generated_headline)
            : clf_->predict(r.source_article, r.generated_headline);
    return p.label == kMatchLabel;
  }
  std::string provenance() const override {
    return detail::concat("native:", to_string(clf_->role()));
  }

 private:
  const LinearClassifier* clf_;
};

class ScoreMatchJudge : public MatchJudge {
 public:
  ScoreMatchJudge(Role role, ScoreTable table)
      : role_(role), table_(std::move(table)) {
    if (role == Role::Main) {
      throw std::runtime_error("match judge requires an hh or ah role");
    }
  }
  bool match(const TransferRecord& r) const override {
    return table_.at(r.id) > 0.5;
  }
  std::string provenance() const override {
    return detail::concat("scores:", to_string(role_));
  }

 private:
  Role role_;
  ScoreTable table_;
};

struct JudgeSet {
  std::shared_ptr<const StyleJudge> main;
  std::shared_ptr<const MatchJudge> hh;
  std::shared_ptr<const MatchJudge> ah;

  void validate() const {
    if (!main || !hh || !ah) {
      throw std::runtime_error("judge set needs main, hh and ah judges");
    }
  }
};

inline JudgeSet native_judges(const LinearClassifier& main,
                              const LinearClassifier& hh,
                              const LinearClassifier& ah) {
  return {std::make_shared<NativeStyleJudge>(main),
          std::make_shared<NativeMatchJudge>(hh),
          std::make_shared<NativeMatchJudge>(ah)};
}

// ---- compliancy ------------------------------------------------------------

// Success requires all three: HH match, AH match, and a reversed main
// decision relative to the original headline. Compliant is always the
// conjunction, never stored separately.
struct ComplianceVerdict {
  bool hh_match = false;
  bool ah_match = false;
  bool main_reversed = false;
  std::string main_label_original;
  std::string main_label_generated;

  bool compliant() const { return hh_match && ah_match && main_reversed; }
};

inline ComplianceVerdict judge(const TransferRecord& record,
                               const JudgeSet& judges) {
  judges.validate();
  ComplianceVerdict v;
  v.hh_match = judges.hh->match(record);
  v.ah_match = judges.ah->match(record);
  v.main_label_original = judges.main->label_original(record);
  v.main_label_generated = judges.main->label_generated(record);
  v.main_reversed = v.main_label_original != v.main_label_generated;
  return v;
}

struct RecordVerdict {
  std::string id;
  Direction direction = Direction::LeftToRight;
  ComplianceVerdict verdict;
};

// ---- reports ---------------------------------------------------------------

enum class ReferenceMode { Auto, SourceHeadline, AlignedReference };

inline const char* to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::SourceHeadline: return "source-headline";
    case ReferenceMode::AlignedReference: return "aligned-reference";
    default: return "auto";
  }
}

inline ReferenceMode reference_mode_from_string(std::string_view s) {
  if (s == "auto") return ReferenceMode::Auto;
  if (s == "source-headline" || s == "source") return ReferenceMode::SourceHeadline;
  if (s == "aligned-reference" || s == "reference") {
    return ReferenceMode::AlignedReference;
  }
  throw std::runtime_error(detail::concat("unknown reference mode \"", s, "\""));
}

struct EvalOptions {
  MetricConfig metric;
  ReferenceMode reference_mode = ReferenceMode::Auto;
};

struct DirectionRow {
  std::size_t count = 0;
  double hh_rate = 0.0;
  double ah_rate = 0.0;
  double main_reversal_rate = 0.0;
  double main_target_rate = 0.0;  // diagnostic: generated labeled target style
  double compliancy = 0.0;
  double bleu_score = 0.0;
  double rouge_score = 0.0;
};

struct EvalReport {
  // Direction rows in fixed order (l2r then r2l); absent directions omitted.
  std::vector<std::pair<Direction, DirectionRow>> rows;
  std::optional<DirectionRow> avg;  // arithmetic mean of direction rows
  std::vector<RecordVerdict> verdicts;
  json metadata;

  const DirectionRow* row(Direction d) const {
    for (const auto& [dir, row] : rows) {
      if (dir == d) return &row;
    }
    return nullptr;
  }
};

namespace detail {

inline std::string reference_tokens_source(const TransferRecord& r,
                                           ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::SourceHeadline:
      return r.original_headline;
    case ReferenceMode::AlignedReference:
      if (!r.reference_headline) {
        throw std::runtime_error(concat(
            "record \"", r.id, "\" has no reference headline"));
      }
      return *r.reference_headline;
    default:
      return r.reference_headline ? *r.reference_headline
                                  : r.original_headline;
  }
}

}  // namespace detail

// Judge every record, aggregate per direction, attach BLEU/ROUGE, and keep
// the per-record verdicts so the aggregates stay auditable.
inline EvalReport evaluate_system(const std::vector<TransferRecord>& records,
                                  const JudgeSet& judges,
                                  const EvalOptions& options = {}) {
  judges.validate();
  options.metric.validate();
  if (records.empty()) {
    throw std::runtime_error("evaluate_system: no records");
  }

  EvalReport report;
  json omitted = json::array();
  for (const Direction dir :
       {Direction::LeftToRight, Direction::RightToLeft}) {
    std::vector<const TransferRecord*> slice;
    for (const TransferRecord& r : records) {
      if (r.direction == dir) slice.push_back(&r);
    }
    if (slice.empty()) {
      omitted.push_back(to_string(dir));
      continue;
    }

    DirectionRow row;
    row.count = slice.size();
    const std::string target_label =
        to_string(dir == Direction::LeftToRight ? Outlet::Right : Outlet::Left);
    std::vector<TokenList> hyps, refs;
    std::size_t hh = 0, ah = 0, reversed = 0, target = 0, compliant = 0;
    for (const TransferRecord* r : slice) {
      const ComplianceVerdict v = judge(*r, judges);
      hh += v.hh_match;
      ah += v.ah_match;
      reversed += v.main_reversed;
      target += v.main_label_generated == target_label;
      compliant += v.compliant();
      report.verdicts.push_back({r->id, dir, v});
      hyps.push_back(tokenize(r->generated_headline));
      refs.push_back(tokenize(
          detail::reference_tokens_source(*r, options.reference_mode)));
    }
    const double n = double(slice.size());
    row.hh_rate = hh / n;
    row.ah_rate = ah / n;
    row.main_reversal_rate = reversed / n;
    row.main_target_rate = target / n;
    row.compliancy = compliant / n;
    row.bleu_score = bleu(hyps, refs, options.metric);
    row.rouge_score =
        rouge_corpus(hyps, refs, options.metric)
            .statistic(options.metric.rouge_statistic);
    report.rows.emplace_back(dir, row);
  }

  if (!report.rows.empty()) {
    DirectionRow avg;
    for (const auto& [dir, row] : report.rows) {
      avg.count += row.count;
      avg.hh_rate += row.hh_rate;
      avg.ah_rate += row.ah_rate;
      avg.main_reversal_rate += row.main_reversal_rate;
      avg.main_target_rate += row.main_target_rate;
      avg.compliancy += row.compliancy;
      avg.bleu_score += row.bleu_score;
      avg.rouge_score += row.rouge_score;
    }
    const double k = double(report.rows.size());
    avg.hh_rate /= k;
    avg.ah_rate /= k;
    avg.main_reversal_rate /= k;
    avg.main_target_rate /= k;
    avg.compliancy /= k;
    avg.bleu_score /= k;
    avg.rouge_score /= k;
    report.avg = avg;
  }

  report.metadata = json{
      {"records", records.size()},
      {"reference_mode", to_string(options.reference_mode)},
      {"omitted_directions", omitted},
      {"metric",
       {{"bleu_max_n", options.metric.bleu_max_n},
        {"bleu_smoothing",
         options.metric.bleu_smoothing == BleuSmoothing::Epsilon ? "epsilon"
                                                                 : "none"},
        {"bleu_epsilon", options.metric.bleu_epsilon},
        {"rouge_variant", to_string(options.metric.rouge_variant)},
        {"rouge_statistic", to_string(options.metric.rouge_statistic)},
        {"tokenizer", "normalize+alnum-split"}}},
      {"judges",
       {{"main", judges.main->provenance()},
        {"hh", judges.hh->provenance()},
        {"ah", judges.ah->provenance()}}}};
  return report;
}

// Gold ceiling: the "generated" headline is the real aligned counterpart,
// judged in both directions.
inline std::vector<TransferRecord> gold_records(const DatasetSplits& splits,
                                                const Corpus& corpus) {
  if (splits.sa.empty()) {
    throw std::runtime_error("SA split is empty");
  }
  std::vector<TransferRecord> records;
  for (const AlignmentCandidate& c : splits.sa) {
    const NewsItem& left = corpus.at(c.left_id);
    const NewsItem& right = corpus.at(c.right_id);
    records.push_back({detail::concat(c.left_id, "::", c.right_id, "::l2r"),
                       Direction::LeftToRight, left.headline, right.headline,
                       left.article, right.headline});
    records.push_back({detail::concat(c.right_id, "::", c.left_id, "::r2l"),
                       Direction::RightToLeft, right.headline, left.headline,
                       right.article, left.headline});
  }
  return records;
}

inline EvalReport gold_upperbound(const DatasetSplits& splits,
                                  const Corpus& corpus, const JudgeSet& judges,
                                  const EvalOptions& options = {}) {
  EvalReport report = evaluate_system(gold_records(splits, corpus), judges,
                                      options);
  report.metadata["run"] = "gold-upperbound";
  return report;
}

// Identity floor: generated = original, so the main decision can never be
// reversed and compliancy is exactly 0 under deterministic judges.
inline std::vector<TransferRecord> identity_records(
    const DatasetSplits& splits, const Corpus& corpus) {
  std::vector<TransferRecord> records = gold_records(splits, corpus);
  for (TransferRecord& r : records) {
    r.generated_headline = r.original_headline;
  }
  return records;
}

inline EvalReport identity_baseline(const DatasetSplits& splits,
                                    const Corpus& corpus,
                                    const JudgeSet& judges,
                                    const EvalOptions& options = {}) {
  EvalReport report = evaluate_system(identity_records(splits, corpus), judges,
                                      options);
  report.metadata["run"] = "identity-baseline";
  return report;
}

// ---- report serialization --------------------------------------------------

inline json report_to_json(const EvalReport& report) {
  auto row_json = [](const DirectionRow& row) {
    return json{{"n", row.count},
                {"hh", row.hh_rate},
                {"ah", row.ah_rate},
                {"main", row.main_reversal_rate},
                {"main_target", row.main_target_rate},
                {"compliancy", row.compliancy},
                {"bleu", row.bleu_score},
                {"rouge", row.rouge_score}};
  };
  json rows = json::object();
  for (const auto& [dir, row] : report.rows) {
    rows[to_string(dir)] = row_json(row);
  }
  if (report.avg) rows["avg"] = row_json(*report.avg);

  json verdicts = json::array();
  for (const RecordVerdict& rv : report.verdicts) {
    verdicts.push_back(json{{"id", rv.id},
                            {"direction", to_string(rv.direction)},
                            {"hh_match", rv.verdict.hh_match},
                            {"ah_match", rv.verdict.ah_match},
                            {"main_reversed", rv.verdict.main_reversed},
                            {"main_original", rv.verdict.main_label_original},
                            {"main_generated", rv.verdict.main_label_generated}});
  }
  return json{{"rows", std::move(rows)},
              {"verdicts", std::move(verdicts)},
              {"metadata", report.metadata}};
}

// Fixed-width rendering mirroring the report matrix.
inline std::string render_report(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %6s %6s %6s %8s %6s %6s %6s %6s\n",
                "", "HH", "AH", "Main", "MainTgt", "Compl", "BLEU", "ROUGE",
                "N");
  out += line;
  auto add = [&](const char* name, const DirectionRow& row) {
    std::snprintf(line, sizeof(line),
                  "%-6s %6.3f %6.3f %6.3f %8.3f %6.3f %6.3f %6.3f %6zu\n",
                  name, row.hh_rate, row.ah_rate, row.main_reversal_rate,
                  row.main_target_rate, row.compliancy, row.bleu_score,
                  row.rouge_score, row.count);
    out += line;
  };
  for (const auto& [dir, row] : report.rows) add(to_string(dir), row);
  if (report.avg) add("avg", *report.avg);
  return out;
}

// ---- synthetic corpus ------------------------------------------------------

struct SynthParams {
  std::size_t n_per_outlet = 1000;
  std::size_t n_aligned = 100;
  std::size_t content_vocab = 5000;
  std::array<std::size_t, 2> marker_vocab_sizes{20, 20};
  double noise_rate = 0.2;
  std::size_t article_tokens = 40;
  std::size_t headline_content_tokens = 6;
  std::size_t headline_marker_tokens = 2;
  std::int64_t date_span_days = 60;

  void validate() const {
    if (n_aligned > n_per_outlet || n_per_outlet == 0 || content_vocab == 0 ||
        marker_vocab_sizes[0] == 0 || marker_vocab_sizes[1] == 0 ||
        noise_rate < 0.0 || noise_rate > 1.0 || article_tokens == 0 ||
        headline_content_tokens == 0 ||
        headline_content_tokens > article_tokens ||
        headline_marker_tokens == 0 || date_span_days < 1) {
      throw std::runtime_error("inconsistent synthetic corpus params");
    }
  }
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<std::pair<std::string, std::string>> planted;  // left id, right id
};

// Two-outlet corpus with outlet-specific style markers in every headline.
// Planted pairs share the article content and headline content words (the
// headline words are kept intact under noise, so they occur in both
// articles) while differing in markers. Fully seed-deterministic.
inline SyntheticCorpus make_synthetic_corpus(const SynthParams& params,
                                             std::uint64_t seed) {
  params.validate();
  Rng rng = Rng::substream(seed, "make_synthetic_corpus");
  const std::int64_t base_day = parse_date("2020-01-01").days;

  auto content_token = [&](std::uint64_t i) {
    return detail::concat("c", i);
  };
  auto marker_token = [&](Outlet o, std::uint64_t i) {
    return detail::concat(o == Outlet::Left ? "lm" : "rm", i);
  };
  auto sample_content = [&](std::size_t n) {
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      tokens.push_back(content_token(rng.uniform(params.content_vocab)));
    }
    return tokens;
  };
  auto join = [](const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out.push_back(' ');
      out += tokens[i];
    }
    return out;
  };
  auto make_headline = [&](const std::vector<std::string>& content, Outlet o) {
    std::vector<std::string> tokens = content;
    const std::size_t vocab =
        params.marker_vocab_sizes[o == Outlet::Left ? 0 : 1];
    for (std::size_t i = 0; i < params.headline_marker_tokens; ++i) {
      tokens.push_back(marker_token(o, rng.uniform(vocab)));
    }
    return join(tokens);
  };
  auto item_id = [&](Outlet o, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%05zu", o == Outlet::Left ? 'l' : 'r',
                  k);
    return std::string(buf);
  };
  auto pick_positions = [&](std::size_t total, std::size_t wanted) {
    std::vector<std::size_t> positions(total);
    for (std::size_t i = 0; i < total; ++i) positions[i] = i;
    rng.shuffle(positions);
    positions.resize(wanted);
    std::sort(positions.begin(), positions.end());
    return positions;
  };

  SyntheticCorpus result;
  for (std::size_t k = 0; k < params.n_aligned; ++k) {
    const Date date{base_day +
                    std::int64_t(rng.uniform(params.date_span_days))};
    std::vector<std::string> base = sample_content(params.article_tokens);
    const auto headline_positions = pick_positions(
        params.article_tokens, params.headline_content_tokens);

    std::vector<std::string> right_article = base;
    std::size_t next_headline_pos = 0;
    for (std::size_t pos = 0; pos < right_article.size(); ++pos) {
      const bool is_headline_word =
          next_headline_pos < headline_positions.size() &&
          headline_positions[next_headline_pos] == pos;
      if (is_headline_word) {
        ++next_headline_pos;
        continue;
      }
      if (rng.next_double() < params.noise_rate) {
        right_article[pos] = content_token(rng.uniform(params.content_vocab));
      }
    }

    std::vector<std::string> headline_content;
    for (const std::size_t pos : headline_positions) {
      headline_content.push_back(base[pos]);
    }

    const std::string left_id = item_id(Outlet::Left, k);
    const std::string right_id = item_id(Outlet::Right, k);
    result.corpus.add({left_id, Outlet::Left, date,
                       make_headline(headline_content, Outlet::Left),
                       join(base)});
    result.corpus.add({right_id, Outlet::Right, date,
                       make_headline(headline_content, Outlet::Right),
                       join(right_article)});
    result.planted.emplace_back(left_id, right_id);
  }

  for (std::size_t k = params.n_aligned; k < params.n_per_outlet; ++k) {
    for (const Outlet o : {Outlet::Left, Outlet::Right}) {
      const Date date{base_day +
                      std::int64_t(rng.uniform(params.date_span_days))};
      std::vector<std::string> article = sample_content(params.article_tokens);
      const auto positions = pick_positions(params.article_tokens,
                                            params.headline_content_tokens);
      std::vector<std::string> headline_content;
      for (const std::size_t pos : positions) {
        headline_content.push_back(article[pos]);
      }
      result.corpus.add({item_id(o, k), o, date,
                         make_headline(headline_content, o), join(article)});
    }
  }
  return result;
}

inline json synth_manifest_to_json(const SyntheticCorpus& synth,
                                   const SynthParams& params,
                                   std::uint64_t seed) {
  json pairs = json::array();
  for (const auto& [left, right] : synth.planted) {
    pairs.push_back(json::array({left, right}));
  }
  return json{{"pairs", std::move(pairs)},
              {"seed", seed},
              {"params",
               {{"n_per_outlet", params.n_per_outlet},
                {"n_aligned", params.n_aligned},
                {"content_vocab", params.content_vocab},
                {"marker_vocab_sizes", params.marker_vocab_sizes},
                {"noise_rate", params.noise_rate},
                {"article_tokens", params.article_tokens},
                {"headline_content_tokens", params.headline_content_tokens},
                {"headline_marker_tokens", params.headline_marker_tokens},
                {"date_span_days", params.date_span_days}}}};
}

}  // namespace styleval
