#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "styleval/jsonl.hpp"
#include "styleval/text.hpp"

namespace styleval {

enum class Outlet { Left, Right };

inline const char* to_string(Outlet o) {
  return o == Outlet::Left ? "left" : "right";
}

inline Outlet outlet_from_string(std::string_view s) {
  if (s == "left") return Outlet::Left;
  if (s == "right") return Outlet::Right;
  throw std::runtime_error(detail::concat("unknown source \"", s, "\""));
}

inline Outlet opposite(Outlet o) {
  return o == Outlet::Left ? Outlet::Right : Outlet::Left;
}

// Calendar date at day precision, stored as days since 1970-01-01 so date
// windows are integer arithmetic.
struct Date {
  std::int64_t days = 0;

  auto operator<=>(const Date&) const = default;
};

namespace detail {

// Days since 1970-01-01 from a civil date (proleptic Gregorian).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                            unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

inline bool is_leap(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30,
                                         31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29u : lengths[m - 1];
}

}  // namespace detail

// Parse "YYYY-MM-DD", validating the calendar (rejects 2019-13-40).
inline Date parse_date(std::string_view s) {
  auto bad = [&] {
    throw std::runtime_error(detail::concat("invalid date \"", s, "\""));
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') bad();
  }
  y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
  m = (s[5] - '0') * 10 + (s[6] - '0');
  d = (s[8] - '0') * 10 + (s[9] - '0');
  if (m < 1 || m > 12 || d < 1 || d > detail::days_in_month(y, m)) bad();
  return Date{detail::days_from_civil(y, m, d)};
}

inline std::string format_date(Date date) {
  std::int64_t y;
  unsigned m, d;
  detail::civil_from_days(date.days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(y), m, d);
  return buf;
}

// One article-headline record. Text fields are stored normalized.
struct NewsItem {
  std::string id;
  Outlet outlet = Outlet::Left;
  Date date;
  std::string headline;
  std::string article;

  bool operator==(const NewsItem&) const = default;
};

class Corpus {
 public:
  void add(NewsItem item) {
    if (!index_.emplace(item.id, items_.size()).second) {
      throw std::runtime_error(
          detail::concat("duplicate id \"", item.id, "\""));
    }
    (item.outlet == Outlet::Left ? left_count_ : right_count_)++;
    items_.push_back(std::move(item));
  }

  const std::vector<NewsItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t count(Outlet o) const {
    return o == Outlet::Left ? left_count_ : right_count_;
  }

  const NewsItem* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
  }

  const NewsItem& at(std::string_view id) const {
    const NewsItem* item = find(id);
    if (!item) {
      throw std::runtime_error(detail::concat("unknown item id \"", id, "\""));
    }
    return *item;
  }

  // Count of unknown record fields skipped while loading.
  std::size_t unknown_field_warnings = 0;

  bool operator==(const Corpus& other) const { return items_ == other.items_; }

 private:
  std::vector<NewsItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t left_count_ = 0;
  std::size_t right_count_ = 0;
};

namespace detail {

inline const json& require_field(const json& record, const char* key,
                                 const std::string& where) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw std::runtime_error(
        concat(where, ": missing or non-string field \"", key, "\""));
  }
  return *it;
}

}  // namespace detail

// Load a line-delimited corpus: {"id","source","date","headline","article"}.
// Text is normalized on the way in; every violation reports its line.
inline Corpus load_corpus(const std::string& path,
                          const NormalizeConfig& normalize = {}) {
  static const std::unordered_set<std::string> known_fields = {
      "id", "source", "date", "headline", "article"};
  Corpus corpus;
  for_each_jsonl(path, [&](std::size_t line_no, const json& record) {
    const std::string where = detail::concat(path, ":", line_no);
    NewsItem item;
    item.id = detail::require_field(record, "id", where).get<std::string>();
    try {
      item.outlet = outlet_from_string(
          detail::require_field(record, "source", where).get<std::string>());
      item.date = parse_date(
          detail::require_field(record, "date", where).get<std::string>());
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(detail::concat(where, ": ", e.what()));
    }
    item.headline = normalize_text(
        detail::require_field(record, "headline", where).get<std::string>(),
        normalize);
    item.article = normalize_text(
        detail::require_field(record, "article", where).get<std::string>(),
        normalize);
    if (item.headline.empty()) {
      throw std::runtime_error(
          detail::concat(where, ": headline empty after normalization"));
    }
    if (item.article.empty()) {
      throw std::runtime_error(
          detail::concat(where, ": article empty after normalization"));
    }
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (!known_fields.count(it.key())) ++corpus.unknown_field_warnings;
    }
    try {
      corpus.add(std::move(item));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(detail::concat(where, ": ", e.what()));
    }
  });
  return corpus;
}

inline json to_json_record(const NewsItem& item) {
  return json{{"id", item.id},
              {"source", to_string(item.outlet)},
              {"date", format_date(item.date)},
              {"headline", item.headline},
              {"article", item.article}};
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  auto out = open_output(path);
  for (const NewsItem& item : corpus.items()) {
    out << to_json_record(item).dump() << '\n';
  }
}

}  // namespace styleval
