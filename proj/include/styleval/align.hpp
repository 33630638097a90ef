#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "styleval/corpus.hpp"
#include "styleval/rng.hpp"
#include "styleval/sparse.hpp"
#include "styleval/tfidf.hpp"

namespace styleval {

enum class AlignmentTier { Strong, Weak, None };

inline const char* to_string(AlignmentTier t) {
  switch (t) {
    case AlignmentTier::Strong: return "strong";
    case AlignmentTier::Weak: return "weak";
    default: return "none";
  }
}

struct AlignThresholds {
  double strong = 0.5;
  double weak = 0.185;

  void validate() const {
    if (!(strong > weak && weak > 0.0)) {
      throw std::runtime_error("alignment thresholds require strong > weak > 0");
    }
  }
};

// Strict inequalities: similarity exactly at a threshold falls to the lower
// tier, so 0.5 is Weak and 0.185 is None.
inline AlignmentTier tier_for(double similarity, const AlignThresholds& t) {
  if (similarity > t.strong) return AlignmentTier::Strong;
  if (similarity > t.weak) return AlignmentTier::Weak;
  return AlignmentTier::None;
}

struct AlignmentCandidate {
  std::string left_id;
  std::string right_id;
  double similarity = 0.0;
  AlignmentTier tier = AlignmentTier::None;

  bool operator==(const AlignmentCandidate&) const = default;
};

// Cross-outlet article alignment: date-window filtering, cosine over tf-idf
// vectors, one-to-one greedy matching by descending similarity, tiering.
// Candidates at or below the weak threshold are discarded before matching.
// Output is sorted (similarity desc, left_id, right_id) and is invariant
// under permutations of the corpus.
inline std::vector<AlignmentCandidate> align_pairs(
    const Corpus& corpus, const TfIdfModel& model, int window_days,
    const AlignThresholds& thresholds) {
  thresholds.validate();

  struct Entry {
    const NewsItem* item;
    SparseVector vec;
  };
  std::vector<Entry> left;
  std::map<std::int64_t, std::vector<Entry>> right_by_day;
  for (const NewsItem& item : corpus.items()) {
    Entry e{&item, vectorize(model, item.article)};
    if (item.outlet == Outlet::Left) {
      left.push_back(std::move(e));
    } else {
      right_by_day[item.date.days].push_back(std::move(e));
    }
  }

  struct Scored {
    double similarity;
    const NewsItem* left;
    const NewsItem* right;
  };
  std::vector<Scored> scored;
  for (const Entry& l : left) {
    for (std::int64_t day = l.item->date.days - window_days;
         day <= l.item->date.days + window_days; ++day) {
      auto bucket = right_by_day.find(day);
      if (bucket == right_by_day.end()) continue;
      for (const Entry& r : bucket->second) {
        const double sim = cosine(l.vec, r.vec);
        if (sim > thresholds.weak) {
          scored.push_back({sim, l.item, r.item});
        }
      }
    }
  }

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.left->id != b.left->id) return a.left->id < b.left->id;
    return a.right->id < b.right->id;
  });

  std::vector<AlignmentCandidate> result;
  std::unordered_set<std::string> used_left, used_right;
  for (const Scored& s : scored) {
    if (used_left.count(s.left->id) || used_right.count(s.right->id)) continue;
    used_left.insert(s.left->id);
    used_right.insert(s.right->id);
    result.push_back({s.left->id, s.right->id, s.similarity,
                      tier_for(s.similarity, thresholds)});
  }
  return result;
}

// The SA/A1/A3/R partition. SA, A1, A3 partition the strong-tier pairs; R is
// every corpus id that is in no strong pair (weakly aligned and non-aligned
// items flow there automatically).
struct DatasetSplits {
  std::vector<AlignmentCandidate> sa;
  std::vector<AlignmentCandidate> a1;
  std::vector<AlignmentCandidate> a3;
  std::vector<std::string> r;
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{0.25, 0.25, 0.50};
};

inline DatasetSplits split_dataset(
    const std::vector<AlignmentCandidate>& candidates, const Corpus& corpus,
    const std::array<double, 3>& fractions, std::uint64_t seed) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (fractions[0] <= 0 || fractions[1] <= 0 || fractions[2] <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw std::runtime_error(
        "split fractions must be positive and sum to 1");
  }

  std::vector<AlignmentCandidate> strong;
  for (const AlignmentCandidate& c : candidates) {
    if (c.tier == AlignmentTier::Strong) strong.push_back(c);
  }
  if (strong.empty()) {
    throw std::runtime_error("split_dataset: no strong-tier candidates");
  }

  // Canonical order before the seeded shuffle, so the partition depends on
  // the candidate set and the seed but not on input order.
  std::sort(strong.begin(), strong.end(),
            [](const AlignmentCandidate& a, const AlignmentCandidate& b) {
              return std::tie(a.left_id, a.right_id) <
                     std::tie(b.left_id, b.right_id);
            });
  Rng rng = Rng::substream(seed, "split_dataset");
  rng.shuffle(strong);

  const std::size_t n = strong.size();
  std::size_t sa_n = static_cast<std::size_t>(std::llround(fractions[0] * n));
  std::size_t a1_n = static_cast<std::size_t>(std::llround(fractions[1] * n));
  sa_n = std::min(sa_n, n);
  a1_n = std::min(a1_n, n - sa_n);

  DatasetSplits splits;
  splits.seed = seed;
  splits.fractions = fractions;
  splits.sa.assign(strong.begin(), strong.begin() + sa_n);
  splits.a1.assign(strong.begin() + sa_n, strong.begin() + sa_n + a1_n);
  splits.a3.assign(strong.begin() + sa_n + a1_n, strong.end());

  std::unordered_set<std::string> in_strong;
  for (const AlignmentCandidate& c : strong) {
    in_strong.insert(c.left_id);
    in_strong.insert(c.right_id);
  }
  for (const NewsItem& item : corpus.items()) {
    if (!in_strong.count(item.id)) splits.r.push_back(item.id);
  }
  return splits;
}

// ---- serialization -------------------------------------------------------

inline void save_candidates(const std::vector<AlignmentCandidate>& candidates,
                            const std::string& path) {
  auto out = open_output(path);
  for (const AlignmentCandidate& c : candidates) {
    out << json{{"left_id", c.left_id},
                {"right_id", c.right_id},
                {"similarity", c.similarity},
                {"tier", to_string(c.tier)}}
               .dump()
        << '\n';
  }
}

inline std::vector<AlignmentCandidate> load_candidates(
    const std::string& path) {
  std::vector<AlignmentCandidate> candidates;
  for_each_jsonl(path, [&](std::size_t line_no, const json& record) {
    AlignmentCandidate c;
    try {
      c.left_id = record.at("left_id").get<std::string>();
      c.right_id = record.at("right_id").get<std::string>();
      c.similarity = record.at("similarity").get<double>();
      const std::string tier = record.at("tier").get<std::string>();
      if (tier == "strong") {
        c.tier = AlignmentTier::Strong;
      } else if (tier == "weak") {
        c.tier = AlignmentTier::Weak;
      } else {
        throw std::runtime_error(detail::concat("unknown tier \"", tier, "\""));
      }
    } catch (const json::exception& e) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": ", e.what()));
    }
    candidates.push_back(std::move(c));
  });
  return candidates;
}

inline json splits_to_json(const DatasetSplits& splits) {
  auto pairs = [](const std::vector<AlignmentCandidate>& v) {
    json arr = json::array();
    for (const AlignmentCandidate& c : v) {
      arr.push_back(json::array({c.left_id, c.right_id}));
    }
    return arr;
  };
  return json{{"SA", pairs(splits.sa)},
              {"A1", pairs(splits.a1)},
              {"A3", pairs(splits.a3)},
              {"R", splits.r},
              {"seed", splits.seed},
              {"fractions", splits.fractions}};
}

// Manifests carry pair ids only; similarities are not reloaded.
inline DatasetSplits splits_from_json(const json& doc) {
  auto pairs = [&](const char* key) {
    std::vector<AlignmentCandidate> v;
    for (const json& entry : doc.at(key)) {
      v.push_back({entry.at(0).get<std::string>(),
                   entry.at(1).get<std::string>(), 0.0,
                   AlignmentTier::Strong});
    }
    return v;
  };
  DatasetSplits splits;
  splits.sa = pairs("SA");
  splits.a1 = pairs("A1");
  splits.a3 = pairs("A3");
  splits.r = doc.at("R").get<std::vector<std::string>>();
  splits.seed = doc.at("seed").get<std::uint64_t>();
  const auto f = doc.at("fractions");
  splits.fractions = {f.at(0).get<double>(), f.at(1).get<double>(),
                      f.at(2).get<double>()};
  return splits;
}

}  // namespace styleval
