// styleval — batch evaluation toolkit for headline style-transfer systems.
//
// Subcommands wire the pipeline end to end: ingest, align, split, train,
// eval-classifiers, evaluate, gold-upperbound, identity-baseline, synth.
// Every subcommand prints a machine-readable JSON summary as its last
// stdout line and writes its declared artifacts; all randomness flows from
// the single --seed through named per-stage substreams.

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "styleval/align.hpp"
#include "styleval/classifier.hpp"
#include "styleval/corpus.hpp"
#include "styleval/harness.hpp"
#include "styleval/metrics.hpp"
#include "styleval/version.hpp"

namespace fs = std::filesystem;
using namespace styleval;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string config_hash;  // filled after parsing
};

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json provenance(const GlobalOptions& global) {
  return json{{"seed", global.seed}, {"config_hash", global.config_hash}};
}

// Line-delimited artifacts keep their pure record schema; their seed and
// config hash live in a sidecar next to the file.
void write_meta_sidecar(const std::string& path, const GlobalOptions& global) {
  write_json_file(path + ".meta.json", provenance(global));
}

void print_summary(json summary, const GlobalOptions& global) {
  summary["seed"] = global.seed;
  summary["config_hash"] = global.config_hash;
  std::cout << summary.dump() << "\n";
}

// ---- option bundles --------------------------------------------------------

struct FeatureFlags {
  int hash_bits = 20;
  std::vector<int> char_ngrams{1, 4};
  std::vector<int> word_ngrams{1, 2};
  bool no_lowercase = false;
  bool no_overlap = false;

  FeatureConfig to_config() const {
    if (char_ngrams.size() != 2 || word_ngrams.size() != 2) {
      throw CLI::ValidationError("n-gram ranges take exactly two values");
    }
    if (hash_bits < 10 || hash_bits > 30) {
      throw CLI::ValidationError("--hash-bits must be in [10, 30]");
    }
    FeatureConfig config;
    config.char_ngram_lo = char_ngrams[0];
    config.char_ngram_hi = char_ngrams[1];
    config.word_ngram_lo = word_ngrams[0];
    config.word_ngram_hi = word_ngrams[1];
    config.hash_dimension = 1u << hash_bits;
    config.lowercase = !no_lowercase;
    config.pair_overlap_features = !no_overlap;
    config.validate();
    return config;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--hash-bits", hash_bits,
                    "Feature space size as a power of two");
    cmd->add_option("--char-ngrams", char_ngrams,
                    "Character n-gram range, e.g. 1,4")
        ->delimiter(',');
    cmd->add_option("--word-ngrams", word_ngrams,
                    "Word n-gram range, e.g. 1,2")
        ->delimiter(',');
    cmd->add_flag("--no-lowercase", no_lowercase,
                  "Do not case-fold before feature extraction");
    cmd->add_flag("--no-overlap", no_overlap,
                  "Disable pair overlap feature slots");
  }
};

struct MetricFlags {
  int bleu_max_n = 4;
  std::string bleu_smoothing = "epsilon";
  double bleu_epsilon = 1e-9;
  std::string rouge_variant = "rougeL";
  std::string rouge_stat = "f1";

  MetricConfig to_config() const {
    MetricConfig config;
    config.bleu_max_n = bleu_max_n;
    if (bleu_smoothing == "epsilon") {
      config.bleu_smoothing = BleuSmoothing::Epsilon;
    } else if (bleu_smoothing == "none") {
      config.bleu_smoothing = BleuSmoothing::None;
    } else {
      throw CLI::ValidationError("--bleu-smoothing must be epsilon or none");
    }
    config.bleu_epsilon = bleu_epsilon;
    if (rouge_variant == "rouge1") {
      config.rouge_variant = RougeVariant::Rouge1;
    } else if (rouge_variant == "rouge2") {
      config.rouge_variant = RougeVariant::Rouge2;
    } else if (rouge_variant == "rougeL") {
      config.rouge_variant = RougeVariant::RougeL;
    } else {
      throw CLI::ValidationError("--rouge-variant must be rouge1|rouge2|rougeL");
    }
    if (rouge_stat == "precision") {
      config.rouge_statistic = RougeStatistic::Precision;
    } else if (rouge_stat == "recall") {
      config.rouge_statistic = RougeStatistic::Recall;
    } else if (rouge_stat == "f1") {
      config.rouge_statistic = RougeStatistic::F1;
    } else {
      throw CLI::ValidationError("--rouge-stat must be precision|recall|f1");
    }
    config.validate();
    return config;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--bleu-max-n", bleu_max_n, "Highest BLEU n-gram order");
    cmd->add_option("--bleu-smoothing", bleu_smoothing, "epsilon or none");
    cmd->add_option("--bleu-epsilon", bleu_epsilon,
                    "Floor for zero clipped counts");
    cmd->add_option("--rouge-variant", rouge_variant,
                    "rouge1, rouge2 or rougeL");
    cmd->add_option("--rouge-stat", rouge_stat,
                    "Reported ROUGE statistic: precision, recall or f1");
  }
};

struct JudgeFlags {
  std::string models_dir;
  std::string main_scores_original;
  std::string main_scores_generated;
  std::string hh_scores;
  std::string ah_scores;

  void attach(CLI::App* cmd, bool models_required) {
    auto* models = cmd->add_option("--models", models_dir,
                                   "Directory holding main.json, hh.json, "
                                   "ah.json");
    if (models_required) models->required();
    cmd->add_option("--main-scores-original", main_scores_original,
                    "External main-classifier scores on original headlines");
    cmd->add_option("--main-scores-generated", main_scores_generated,
                    "External main-classifier scores on generated headlines");
    cmd->add_option("--hh-scores", hh_scores, "External HH scores per record");
    cmd->add_option("--ah-scores", ah_scores, "External AH scores per record");
  }

  // Native classifiers from --models, individually replaceable by external
  // score tables. Loaded models are kept alive by the returned holder.
  JudgeSet build(std::vector<std::shared_ptr<LinearClassifier>>& holder) const {
    JudgeSet judges;
    auto load = [&](Role role) {
      if (models_dir.empty()) {
        throw std::runtime_error(
            detail::concat("no --models directory and no external scores for ",
                           to_string(role)));
      }
      auto clf = std::make_shared<LinearClassifier>(load_model(
          (fs::path(models_dir) / (std::string(to_string(role)) + ".json"))
              .string()));
      holder.push_back(clf);
      return clf;
    };
    if (!main_scores_original.empty() || !main_scores_generated.empty()) {
      if (main_scores_original.empty() || main_scores_generated.empty()) {
        throw std::runtime_error(
            "external main scores need both --main-scores-original and "
            "--main-scores-generated");
      }
      judges.main = std::make_shared<ScoreStyleJudge>(
          import_external_scores(main_scores_original),
          import_external_scores(main_scores_generated));
    } else {
      auto clf = load(Role::Main);
      judges.main =
          std::shared_ptr<const StyleJudge>(new NativeStyleJudge(*clf));
    }
    if (!hh_scores.empty()) {
      judges.hh = std::make_shared<ScoreMatchJudge>(
          Role::HH, import_external_scores(hh_scores));
    } else {
      auto clf = load(Role::HH);
      judges.hh =
          std::shared_ptr<const MatchJudge>(new NativeMatchJudge(*clf));
    }
    if (!ah_scores.empty()) {
      judges.ah = std::make_shared<ScoreMatchJudge>(
          Role::AH, import_external_scores(ah_scores));
    } else {
      auto clf = load(Role::AH);
      judges.ah =
          std::shared_ptr<const MatchJudge>(new NativeMatchJudge(*clf));
    }
    return judges;
  }
};

// ---- table-1 rendering -----------------------------------------------------

std::string render_classifier_table(
    const std::vector<ClassifierReport>& reports) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-5s %-9s %6s %6s %6s %8s\n", "", "",
                "prec", "rec", "f", "support");
  out += line;
  for (const ClassifierReport& report : reports) {
    for (const auto& row : report.rows) {
      std::snprintf(line, sizeof(line), "%-5s %-9s %6.2f %6.2f %6.2f %8zu\n",
                    to_string(report.role), row.label.c_str(), row.precision,
                    row.recall, row.f1, row.support);
      out += line;
    }
  }
  return out;
}

json classifier_report_to_json(const ClassifierReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back(json{{"label", row.label},
                        {"precision", row.precision},
                        {"recall", row.recall},
                        {"f1", row.f1},
                        {"support", row.support}});
  }
  return json{{"role", to_string(report.role)},
              {"rows", std::move(rows)},
              {"macro_precision", report.macro_precision},
              {"macro_recall", report.macro_recall},
              {"macro_f1", report.macro_f1},
              {"accuracy", report.accuracy},
              {"n", report.n}};
}

void write_report_artifact(const EvalReport& report, const std::string& path,
                           const GlobalOptions& global) {
  json doc = report_to_json(report);
  doc["metadata"]["seed"] = global.seed;
  doc["metadata"]["config_hash"] = global.config_hash;
  write_json_file(path, doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation toolkit for headline style transfer: corpus "
               "alignment, purposely-trained classifiers, compliancy "
               "scoring, and BLEU/ROUGE reference metrics."};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Config file (TOML/INI long-option values)")
      ->envname("STYLEVAL_CONFIG");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GlobalOptions global;
  app.add_option("--seed", global.seed,
                 "Global seed; every stage derives a named substream");

  // ingest
  std::string in_corpus, out_path, manifest_path;
  bool no_lowercase_corpus = false;
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus");
  ingest->add_option("--corpus", in_corpus, "Input corpus (jsonl)")->required();
  ingest->add_option("--out", out_path, "Re-emit the normalized corpus here");
  ingest->add_flag("--no-lowercase", no_lowercase_corpus,
                   "Keep case during normalization");

  // align
  int window_days = 3;
  AlignThresholds thresholds;
  std::size_t min_df = 1;
  auto* align_cmd = app.add_subcommand("align", "Score cross-outlet article "
                                                "pairs and tier them");
  align_cmd->add_option("--corpus", in_corpus, "Input corpus")->required();
  align_cmd->add_option("--out", out_path, "Candidate output (jsonl)")
      ->required();
  align_cmd->add_option("--window-days", window_days,
                        "Max date distance for a candidate pair");
  align_cmd->add_option("--strong", thresholds.strong, "Strong-tier threshold");
  align_cmd->add_option("--weak", thresholds.weak, "Weak-tier threshold");
  align_cmd->add_option("--min-df", min_df, "Minimum document frequency");

  // split
  std::string candidates_path, splits_path;
  std::vector<double> fractions{0.25, 0.25, 0.50};
  auto* split_cmd =
      app.add_subcommand("split", "Partition strong pairs into SA/A1/A3 + R");
  split_cmd->add_option("--corpus", in_corpus, "Input corpus")->required();
  split_cmd->add_option("--candidates", candidates_path,
                        "Alignment candidates (jsonl)")->required();
  split_cmd->add_option("--out", out_path, "Splits manifest (json)")
      ->required();
  split_cmd->add_option("--fractions", fractions, "SA,A1,A3 fractions")
      ->delimiter(',');

  // train
  std::string role_arg = "all", models_dir;
  FeatureFlags feature_flags;
  Hyper hyper;
  auto* train_cmd =
      app.add_subcommand("train", "Train classifier roles on the split recipes");
  train_cmd->add_option("--corpus", in_corpus, "Input corpus")->required();
  train_cmd->add_option("--splits", splits_path, "Splits manifest")->required();
  train_cmd->add_option("--role", role_arg, "main, hh, ah or all");
  train_cmd->add_option("--out-dir", models_dir, "Model output directory")
      ->required();
  train_cmd->add_option("--epochs", hyper.epochs, "SGD epochs");
  train_cmd->add_option("--learning-rate", hyper.learning_rate,
                        "Initial learning rate (1/sqrt(t) decay)");
  train_cmd->add_option("--l2", hyper.l2, "L2 regularization strength");
  feature_flags.attach(train_cmd);

  // eval-classifiers
  auto* evalclf_cmd = app.add_subcommand(
      "eval-classifiers", "Evaluate trained classifiers on the held-out SA "
                          "gold sets");
  evalclf_cmd->add_option("--corpus", in_corpus, "Input corpus")->required();
  evalclf_cmd->add_option("--splits", splits_path, "Splits manifest")
      ->required();
  evalclf_cmd->add_option("--models", models_dir, "Model directory")
      ->required();
  evalclf_cmd->add_option("--out", out_path, "Report output (json)");

  // evaluate
  std::string records_path, reference_mode_arg = "auto";
  MetricFlags metric_flags;
  JudgeFlags judge_flags;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Judge a transfer-record file and emit the report matrix");
  evaluate_cmd->add_option("--records", records_path,
                           "Transfer records (jsonl)")->required();
  evaluate_cmd->add_option("--out", out_path, "Report output (json)")
      ->required();
  evaluate_cmd->add_option("--reference-mode", reference_mode_arg,
                           "BLEU/ROUGE reference: auto, source or reference");
  judge_flags.attach(evaluate_cmd, /*models_required=*/false);
  metric_flags.attach(evaluate_cmd);

  // gold-upperbound / identity-baseline
  std::string export_records_path;
  MetricFlags gold_metric_flags;
  JudgeFlags gold_judge_flags;
  std::string gold_reference_mode = "auto";
  auto* gold_cmd = app.add_subcommand(
      "gold-upperbound",
      "Judge the aligned counterpart headlines as the generated output");
  MetricFlags identity_metric_flags;
  JudgeFlags identity_judge_flags;
  std::string identity_reference_mode = "auto";
  auto* identity_cmd = app.add_subcommand(
      "identity-baseline", "Judge an identity system over the SA pairs");
  for (auto* cmd : {gold_cmd, identity_cmd}) {
    cmd->add_option("--corpus", in_corpus, "Input corpus")->required();
    cmd->add_option("--splits", splits_path, "Splits manifest")->required();
    cmd->add_option("--out", out_path, "Report output (json)")->required();
    cmd->add_option("--export-records", export_records_path,
                    "Also write the judged transfer records (jsonl)");
  }
  gold_judge_flags.attach(gold_cmd, /*models_required=*/false);
  gold_metric_flags.attach(gold_cmd);
  gold_cmd->add_option("--reference-mode", gold_reference_mode,
                       "BLEU/ROUGE reference: auto, source or reference");
  identity_judge_flags.attach(identity_cmd, /*models_required=*/false);
  identity_metric_flags.attach(identity_cmd);
  identity_cmd->add_option("--reference-mode", identity_reference_mode,
                           "BLEU/ROUGE reference: auto, source or reference");

  // synth
  SynthParams synth_params;
  std::vector<std::size_t> marker_vocab{20, 20};
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a seeded synthetic two-outlet corpus");
  synth_cmd->add_option("--out", out_path, "Corpus output (jsonl)")->required();
  synth_cmd->add_option("--manifest", manifest_path,
                        "Planted-alignment manifest (json)")->required();
  synth_cmd->add_option("--n-per-outlet", synth_params.n_per_outlet,
                        "Items per outlet");
  synth_cmd->add_option("--n-aligned", synth_params.n_aligned,
                        "Planted aligned pairs");
  synth_cmd->add_option("--content-vocab", synth_params.content_vocab,
                        "Shared content vocabulary size");
  synth_cmd->add_option("--marker-vocab", marker_vocab,
                        "Marker vocabulary sizes, left,right")
      ->delimiter(',');
  synth_cmd->add_option("--noise-rate", synth_params.noise_rate,
                        "Token replacement rate in aligned counterparts");
  synth_cmd->add_option("--article-tokens", synth_params.article_tokens,
                        "Tokens per article");
  synth_cmd->add_option("--headline-content",
                        synth_params.headline_content_tokens,
                        "Content tokens per headline");
  synth_cmd->add_option("--headline-markers",
                        synth_params.headline_marker_tokens,
                        "Style marker tokens per headline");
  synth_cmd->add_option("--date-span", synth_params.date_span_days,
                        "Publication day span");

  CLI11_PARSE(app, argc, argv);

  global.config_hash = hash_hex(fnv1a64(app.config_to_str(true, false)));

  try {
    if (*ingest) {
      NormalizeConfig normalize{.lowercase = !no_lowercase_corpus};
      Corpus corpus = load_corpus(in_corpus, normalize);
      if (!out_path.empty()) {
        save_corpus(corpus, out_path);
        write_meta_sidecar(out_path, global);
      }
      print_summary(json{{"command", "ingest"},
                         {"items", corpus.size()},
                         {"left", corpus.count(Outlet::Left)},
                         {"right", corpus.count(Outlet::Right)},
                         {"unknown_field_warnings",
                          corpus.unknown_field_warnings}},
                    global);
    } else if (*align_cmd) {
      Corpus corpus = load_corpus(in_corpus);
      std::vector<std::string> articles;
      articles.reserve(corpus.size());
      for (const NewsItem& item : corpus.items()) {
        articles.push_back(item.article);
      }
      TfIdfModel model = fit_tfidf(articles, min_df);
      auto candidates = align_pairs(corpus, model, window_days, thresholds);
      save_candidates(candidates, out_path);
      write_meta_sidecar(out_path, global);
      std::size_t strong = 0;
      for (const auto& c : candidates) {
        strong += c.tier == AlignmentTier::Strong;
      }
      print_summary(json{{"command", "align"},
                         {"candidates", candidates.size()},
                         {"strong", strong},
                         {"weak", candidates.size() - strong},
                         {"vocabulary", model.vocabulary.size()}},
                    global);
    } else if (*split_cmd) {
      if (fractions.size() != 3) {
        throw std::runtime_error("--fractions takes exactly three values");
      }
      Corpus corpus = load_corpus(in_corpus);
      auto candidates = load_candidates(candidates_path);
      DatasetSplits splits =
          split_dataset(candidates, corpus,
                        {fractions[0], fractions[1], fractions[2]},
                        global.seed);
      json doc = splits_to_json(splits);
      doc["config_hash"] = global.config_hash;
      write_json_file(out_path, doc);
      print_summary(json{{"command", "split"},
                         {"SA", splits.sa.size()},
                         {"A1", splits.a1.size()},
                         {"A3", splits.a3.size()},
                         {"R", splits.r.size()}},
                    global);
    } else if (*train_cmd) {
      Corpus corpus = load_corpus(in_corpus);
      DatasetSplits splits = splits_from_json(read_json_file(splits_path));
      FeatureConfig feature_config = feature_flags.to_config();
      std::vector<Role> roles;
      if (role_arg == "all") {
        roles = {Role::Main, Role::HH, Role::AH};
      } else {
        roles = {role_from_string(role_arg)};
      }
      fs::create_directories(models_dir);
      json trained = json::object();
      for (const Role role : roles) {
        auto examples = build_training(role, splits, corpus, global.seed);
        LinearClassifier clf =
            train_linear(role, default_labels(role), examples, feature_config,
                         hyper, global.seed);
        json doc = model_to_json(clf);
        doc["config_hash"] = global.config_hash;
        const std::string path =
            (fs::path(models_dir) / (std::string(to_string(role)) + ".json"))
                .string();
        write_json_file(path, doc);
        trained[to_string(role)] =
            json{{"examples", examples.size()}, {"path", path}};
      }
      print_summary(json{{"command", "train"}, {"models", trained}}, global);
    } else if (*evalclf_cmd) {
      Corpus corpus = load_corpus(in_corpus);
      DatasetSplits splits = splits_from_json(read_json_file(splits_path));
      std::vector<ClassifierReport> reports;
      json doc = json::object();
      for (const Role role : {Role::Main, Role::HH, Role::AH}) {
        LinearClassifier clf = load_model(
            (fs::path(models_dir) / (std::string(to_string(role)) + ".json"))
                .string());
        auto gold = build_gold_eval(role, splits, corpus, global.seed);
        reports.push_back(evaluate_classifier(clf, gold));
        doc[to_string(role)] = classifier_report_to_json(reports.back());
      }
      doc["provenance"] = provenance(global);
      if (!out_path.empty()) write_json_file(out_path, doc);
      std::cout << render_classifier_table(reports);
      print_summary(json{{"command", "eval-classifiers"},
                         {"main_macro_f1", reports[0].macro_f1},
                         {"hh_macro_f1", reports[1].macro_f1},
                         {"ah_macro_f1", reports[2].macro_f1}},
                    global);
    } else if (*evaluate_cmd) {
      auto records = load_transfer_records(records_path);
      std::vector<std::shared_ptr<LinearClassifier>> holder;
      JudgeSet judges = judge_flags.build(holder);
      EvalOptions options{metric_flags.to_config(),
                          reference_mode_from_string(reference_mode_arg)};
      EvalReport report = evaluate_system(records, judges, options);
      write_report_artifact(report, out_path, global);
      std::cout << render_report(report);
      print_summary(json{{"command", "evaluate"},
                         {"records", records.size()},
                         {"out", out_path}},
                    global);
    } else if (*gold_cmd || *identity_cmd) {
      const bool is_gold = static_cast<bool>(*gold_cmd);
      Corpus corpus = load_corpus(in_corpus);
      DatasetSplits splits = splits_from_json(read_json_file(splits_path));
      auto records = is_gold ? gold_records(splits, corpus)
                             : identity_records(splits, corpus);
      JudgeFlags& jf = is_gold ? gold_judge_flags : identity_judge_flags;
      MetricFlags& mf = is_gold ? gold_metric_flags : identity_metric_flags;
      const std::string& mode_arg =
          is_gold ? gold_reference_mode : identity_reference_mode;
      std::vector<std::shared_ptr<LinearClassifier>> holder;
      JudgeSet judges = jf.build(holder);
      EvalOptions options{mf.to_config(),
                          reference_mode_from_string(mode_arg)};
      EvalReport report = evaluate_system(records, judges, options);
      write_report_artifact(report, out_path, global);
      if (!export_records_path.empty()) {
        save_transfer_records(records, export_records_path);
        write_meta_sidecar(export_records_path, global);
      }
      std::cout << render_report(report);
      print_summary(
          json{{"command", is_gold ? "gold-upperbound" : "identity-baseline"},
               {"records", records.size()},
               {"out", out_path}},
          global);
    } else if (*synth_cmd) {
      if (marker_vocab.size() != 2) {
        throw std::runtime_error("--marker-vocab takes exactly two values");
      }
      synth_params.marker_vocab_sizes = {marker_vocab[0], marker_vocab[1]};
      SyntheticCorpus synth = make_synthetic_corpus(synth_params, global.seed);
      save_corpus(synth.corpus, out_path);
      write_meta_sidecar(out_path, global);
      json manifest = synth_manifest_to_json(synth, synth_params, global.seed);
      manifest["config_hash"] = global.config_hash;
      write_json_file(manifest_path, manifest);
      print_summary(json{{"command", "synth"},
                         {"items", synth.corpus.size()},
                         {"planted_pairs", synth.planted.size()}},
                    global);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
