#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "styleval/sparse.hpp"
#include "styleval/text.hpp"

namespace styleval {

// Smoothed tf-idf model over whole articles. Vocabulary indices are dense
// and lexicographic, so fitting is deterministic.
struct TfIdfModel {
  std::map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;  // by vocabulary index, all > 0
  std::size_t document_count = 0;
  std::size_t min_df = 1;
};

// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over tokenized documents. Tokens in
// fewer than min_df documents are dropped from the vocabulary.
inline TfIdfModel fit_tfidf(const std::vector<std::string>& documents,
                            std::size_t min_df = 1) {
  if (documents.empty()) {
    throw std::runtime_error("fit_tfidf: empty document collection");
  }
  std::map<std::string, std::size_t> df;
  bool any_tokens = false;
  for (const std::string& doc : documents) {
    std::map<std::string, bool> seen;
    for (std::string& token : tokenize(doc)) seen.emplace(std::move(token), true);
    any_tokens |= !seen.empty();
    for (const auto& [token, unused] : seen) df[token]++;
  }
  if (!any_tokens) {
    throw std::runtime_error("fit_tfidf: no nonempty documents");
  }
  TfIdfModel model;
  model.document_count = documents.size();
  model.min_df = min_df;
  const double n = static_cast<double>(documents.size());
  for (const auto& [token, count] : df) {
    if (count < min_df) continue;
    const std::uint32_t index =
        static_cast<std::uint32_t>(model.vocabulary.size());
    model.vocabulary.emplace(token, index);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + double(count))) + 1.0);
  }
  return model;
}

// tf * idf, L2-normalized. Out-of-vocabulary tokens are ignored; an all-OOV
// text yields the zero vector.
inline SparseVector vectorize(const TfIdfModel& model, const std::string& text) {
  std::map<std::uint32_t, double> counts;
  for (const std::string& token : tokenize(text)) {
    auto it = model.vocabulary.find(token);
    if (it != model.vocabulary.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.entries.reserve(counts.size());
  for (const auto& [index, tf] : counts) {
    v.entries.emplace_back(index, tf * model.idf[index]);
  }
  l2_normalize(v);
  return v;
}

}  // namespace styleval
