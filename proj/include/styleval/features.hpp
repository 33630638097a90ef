#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "styleval/rng.hpp"
#include "styleval/sparse.hpp"
#include "styleval/text.hpp"

namespace styleval {

// Hashed n-gram feature space. When pair_overlap_features is on, the top
// three indices of the space are reserved for the overlap slots and the
// hashed grams occupy [0, hash_dimension - 3).
struct FeatureConfig {
  int char_ngram_lo = 1;
  int char_ngram_hi = 4;
  int word_ngram_lo = 1;
  int word_ngram_hi = 2;
  std::uint32_t hash_dimension = 1u << 20;
  bool lowercase = true;
  bool pair_overlap_features = true;

  void validate() const {
    if (char_ngram_lo < 1 || char_ngram_lo > char_ngram_hi ||
        word_ngram_lo < 1 || word_ngram_lo > word_ngram_hi) {
      throw std::runtime_error("feature n-gram ranges require 1 <= lo <= hi");
    }
    if (hash_dimension < (1u << 10) ||
        (hash_dimension & (hash_dimension - 1)) != 0) {
      throw std::runtime_error(
          "hash_dimension must be a power of two >= 1024");
    }
  }
};

namespace detail {

// Byte offsets of code point starts, plus the end offset.
inline std::vector<std::size_t> codepoint_starts(std::string_view s) {
  std::vector<std::size_t> starts;
  std::size_t i = 0;
  while (i < s.size()) {
    starts.push_back(i);
    const unsigned char b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : b < 0xe0 ? 2 : b < 0xf0 ? 3 : 4;
    if (b >= 0x80 && b < 0xc0) len = 1;  // stray continuation byte
    i = std::min(i + len, s.size());
  }
  starts.push_back(s.size());
  return starts;
}

// FNV-1a over "<ns>|<gram>", reduced into the gram block.
inline std::uint32_t gram_index(std::string_view ns, std::string_view gram,
                                std::uint32_t gram_dim) {
  std::uint64_t h = fnv1a64(ns);
  h = fnv1a64("|", h);
  h = fnv1a64(gram, h);
  return static_cast<std::uint32_t>(h % gram_dim);
}

inline void accumulate_grams(std::string_view text, std::string_view ns,
                             const FeatureConfig& config,
                             std::uint32_t gram_dim,
                             std::map<std::uint32_t, double>& counts) {
  const std::string char_ns = std::string(ns) + "c";
  const std::string word_ns = std::string(ns) + "w";

  const auto starts = codepoint_starts(text);
  const std::size_t n_cp = starts.size() - 1;
  for (int n = config.char_ngram_lo; n <= config.char_ngram_hi; ++n) {
    if (n_cp < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= n_cp; ++i) {
      const std::string_view gram =
          text.substr(starts[i], starts[i + n] - starts[i]);
      counts[gram_index(char_ns, gram, gram_dim)] += 1.0;
    }
  }

  const std::vector<std::string> tokens = split_alnum(text);
  for (int n = config.word_ngram_lo; n <= config.word_ngram_hi; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
        gram.push_back('\x1f');
        gram.append(tokens[i + j]);
      }
      counts[gram_index(word_ns, gram, gram_dim)] += 1.0;
    }
  }
}

inline std::map<std::string, std::size_t> token_counts(
    const std::vector<std::string>& tokens) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& t : tokens) counts[t]++;
  return counts;
}

}  // namespace detail

// Hash a single text into the feature space; deterministic, L2-normalized,
// empty text yields the zero vector.
inline SparseVector featurize(std::string_view text,
                              const FeatureConfig& config) {
  config.validate();
  const std::string folded =
      config.lowercase ? fold_case(text) : std::string(text);
  std::map<std::uint32_t, double> counts;
  detail::accumulate_grams(folded, "t", config, config.hash_dimension, counts);
  SparseVector v = SparseVector::from_counts(counts);
  l2_normalize(v);
  return v;
}

// Hash a text pair: namespaced grams of both sides, L2-normalized together,
// plus (when enabled) three raw-valued overlap slots at the top of the
// space: token-set Jaccard, cosine of raw term-frequency vectors, and token
// length ratio min/max. Slot values are not normalized away, so identical
// texts put exactly 1.0 in the Jaccard and tf-cosine slots.
inline SparseVector featurize_pair(std::string_view a, std::string_view b,
                                   const FeatureConfig& config) {
  config.validate();
  const std::string fa = config.lowercase ? fold_case(a) : std::string(a);
  const std::string fb = config.lowercase ? fold_case(b) : std::string(b);
  const std::uint32_t gram_dim = config.pair_overlap_features
                                     ? config.hash_dimension - 3
                                     : config.hash_dimension;

  std::map<std::uint32_t, double> counts;
  detail::accumulate_grams(fa, "a", config, gram_dim, counts);
  detail::accumulate_grams(fb, "b", config, gram_dim, counts);
  SparseVector v = SparseVector::from_counts(counts);
  l2_normalize(v);

  if (config.pair_overlap_features) {
    const auto ta = split_alnum(fa);
    const auto tb = split_alnum(fb);
    const auto ca = detail::token_counts(ta);
    const auto cb = detail::token_counts(tb);

    std::size_t intersection = 0;
    double dot_tf = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (const auto& [token, count] : ca) {
      norm_a += double(count) * double(count);
      auto it = cb.find(token);
      if (it != cb.end()) {
        ++intersection;
        dot_tf += double(count) * double(it->second);
      }
    }
    for (const auto& [token, count] : cb) {
      norm_b += double(count) * double(count);
    }
    const std::size_t unions = ca.size() + cb.size() - intersection;

    const double jaccard =
        unions > 0 ? double(intersection) / double(unions) : 0.0;
    // counts are integers, so sqrt(norm_a * norm_b) is exact for a == b
    const double tf_cosine =
        norm_a > 0.0 && norm_b > 0.0 ? dot_tf / std::sqrt(norm_a * norm_b)
                                     : 0.0;
    const std::size_t longer = std::max(ta.size(), tb.size());
    const double length_ratio =
        longer > 0 ? double(std::min(ta.size(), tb.size())) / double(longer)
                   : 0.0;

    if (jaccard != 0.0) v.entries.emplace_back(gram_dim, jaccard);
    if (tf_cosine != 0.0) v.entries.emplace_back(gram_dim + 1, tf_cosine);
    if (length_ratio != 0.0) v.entries.emplace_back(gram_dim + 2, length_ratio);
  }
  return v;
}

}  // namespace styleval
