#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace styleval {

using TokenList = std::vector<std::string>;

enum class BleuSmoothing { None, Epsilon };
enum class RougeVariant { Rouge1, Rouge2, RougeL };
enum class RougeStatistic { Precision, Recall, F1 };

struct MetricConfig {
  int bleu_max_n = 4;
  BleuSmoothing bleu_smoothing = BleuSmoothing::Epsilon;
  double bleu_epsilon = 1e-9;
  RougeVariant rouge_variant = RougeVariant::RougeL;
  RougeStatistic rouge_statistic = RougeStatistic::F1;

  void validate() const {
    if (bleu_max_n < 1) throw std::runtime_error("bleu_max_n must be >= 1");
    if (bleu_smoothing == BleuSmoothing::Epsilon && bleu_epsilon <= 0.0) {
      throw std::runtime_error("bleu epsilon must be > 0");
    }
  }
};

inline const char* to_string(RougeVariant v) {
  switch (v) {
    case RougeVariant::Rouge1: return "rouge1";
    case RougeVariant::Rouge2: return "rouge2";
    default: return "rougeL";
  }
}

inline const char* to_string(RougeStatistic s) {
  switch (s) {
    case RougeStatistic::Precision: return "precision";
    case RougeStatistic::Recall: return "recall";
    default: return "f1";
  }
}

namespace detail {

// n-gram counts keyed by joined tokens; \x1f never occurs inside tokens
// produced by the alnum tokenizer.
inline std::map<std::string, std::size_t> ngram_counts(const TokenList& tokens,
                                                       std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key.append(tokens[i + j]);
    }
    counts[std::move(key)]++;
  }
  return counts;
}

inline std::size_t clipped_overlap(
    const std::map<std::string, std::size_t>& hyp,
    const std::map<std::string, std::size_t>& ref) {
  std::size_t matched = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return matched;
}

}  // namespace detail

// Longest common subsequence length, dynamic programming with a rolling row.
// Symmetric; lcs_length(a, b) <= min(|a|, |b|).
inline std::size_t lcs_length(const TokenList& a, const TokenList& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;  // row[j-1] from the previous iteration of i
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1
                                    : std::max(above, row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

// Corpus-level BLEU with clipped n-gram precisions and brevity penalty
// BP = 1 if c > r else exp(1 - r/c). Under epsilon smoothing a zero clipped
// count is floored by substituting epsilon for the count, so token-disjoint
// corpora score near zero instead of exactly zero.
inline double bleu(const std::vector<TokenList>& hypotheses,
                   const std::vector<TokenList>& references,
                   const MetricConfig& config = {}) {
  config.validate();
  if (hypotheses.size() != references.size()) {
    throw std::runtime_error("bleu: hypothesis/reference count mismatch");
  }
  if (hypotheses.empty()) throw std::runtime_error("bleu: empty corpus");

  std::size_t hyp_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    hyp_len += hypotheses[i].size();
    ref_len += references[i].size();
  }
  if (hyp_len == 0) {
    if (config.bleu_smoothing == BleuSmoothing::None) {
      throw std::runtime_error("bleu: empty hypotheses without smoothing");
    }
    return 0.0;
  }

  double log_precision_sum = 0.0;
  for (int n = 1; n <= config.bleu_max_n; ++n) {
    std::size_t matched = 0, total = 0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
      const auto hyp_grams = detail::ngram_counts(hypotheses[i], n);
      const auto ref_grams = detail::ngram_counts(references[i], n);
      for (const auto& [gram, count] : hyp_grams) total += count;
      matched += detail::clipped_overlap(hyp_grams, ref_grams);
    }
    double p;
    if (matched > 0) {
      p = double(matched) / double(total);
    } else if (config.bleu_smoothing == BleuSmoothing::Epsilon) {
      p = total > 0 ? config.bleu_epsilon / double(total) : config.bleu_epsilon;
    } else {
      throw std::runtime_error(
          "bleu: zero n-gram matches without smoothing (undefined log)");
    }
    log_precision_sum += std::log(p);
  }

  const double bp = hyp_len > ref_len
                        ? 1.0
                        : std::exp(1.0 - double(ref_len) / double(hyp_len));
  return bp * std::exp(log_precision_sum / config.bleu_max_n);
}

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  double statistic(RougeStatistic s) const {
    switch (s) {
      case RougeStatistic::Precision: return precision;
      case RougeStatistic::Recall: return recall;
      default: return f1;
    }
  }
};

// Single-pair ROUGE. rouge1/rouge2 use clipped n-gram overlap; rougeL uses
// LCS length over the respective lengths. F1 = 2PR/(P+R), 0 when P+R = 0.
inline RougeScore rouge(const TokenList& hypothesis, const TokenList& reference,
                        const MetricConfig& config = {}) {
  if (reference.empty()) throw std::runtime_error("rouge: empty reference");

  double overlap, hyp_total, ref_total;
  if (config.rouge_variant == RougeVariant::RougeL) {
    overlap = double(lcs_length(hypothesis, reference));
    hyp_total = double(hypothesis.size());
    ref_total = double(reference.size());
  } else {
    const std::size_t n = config.rouge_variant == RougeVariant::Rouge1 ? 1 : 2;
    const auto hyp_grams = detail::ngram_counts(hypothesis, n);
    const auto ref_grams = detail::ngram_counts(reference, n);
    overlap = double(detail::clipped_overlap(hyp_grams, ref_grams));
    hyp_total = ref_total = 0.0;
    for (const auto& [gram, count] : hyp_grams) hyp_total += double(count);
    for (const auto& [gram, count] : ref_grams) ref_total += double(count);
  }

  RougeScore score;
  score.precision = hyp_total > 0.0 ? overlap / hyp_total : 0.0;
  score.recall = ref_total > 0.0 ? overlap / ref_total : 0.0;
  const double pr = score.precision + score.recall;
  score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
  return score;
}

// Arithmetic mean of per-pair scores.
inline RougeScore rouge_corpus(const std::vector<TokenList>& hypotheses,
                               const std::vector<TokenList>& references,
                               const MetricConfig& config = {}) {
  if (hypotheses.size() != references.size()) {
    throw std::runtime_error("rouge: hypothesis/reference count mismatch");
  }
  if (hypotheses.empty()) throw std::runtime_error("rouge: empty corpus");
  RougeScore mean;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const RougeScore s = rouge(hypotheses[i], references[i], config);
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  const double n = double(hypotheses.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

}  // namespace styleval
