#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace styleval {

struct NormalizeConfig {
  bool lowercase = true;
};

namespace detail {

inline const icu::Normalizer2& nfc_instance() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

}  // namespace detail

// Locale-independent case fold (UTF-8 in, UTF-8 out).
inline std::string fold_case(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  s.toUTF8String(out);
  return out;
}

// Canonical composition (NFC), UTF-8 in, UTF-8 out. Invalid byte sequences
// are replaced with U+FFFD, so the result is always well-formed.
inline std::string nfc(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString composed = detail::nfc_instance().normalize(s, ec);
  if (U_FAILURE(ec)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  composed.toUTF8String(out);
  return out;
}

// Collapse runs of Unicode whitespace to single ASCII spaces, trim ends.
inline std::string collapse_whitespace(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  bool seen_nonspace = false;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(utf8.size());
  const uint8_t* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < n) {
    const int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    if (cp >= 0 && u_isUWhiteSpace(cp)) {
      pending_space = seen_nonspace;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(utf8.substr(start, i - start));
    seen_nonspace = true;
  }
  return out;
}

// Canonical text form shared by the whole pipeline: optional case fold,
// canonical composition, whitespace collapse. Idempotent.
inline std::string normalize_text(std::string_view raw,
                                  const NormalizeConfig& config = {}) {
  std::string s = config.lowercase ? fold_case(raw) : std::string(raw);
  return collapse_whitespace(nfc(s));
}

// Split into maximal runs of alphanumeric code points. No case change.
inline std::vector<std::string> split_alnum(std::string_view utf8) {
  std::vector<std::string> tokens;
  std::string current;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(utf8.size());
  const uint8_t* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < n) {
    const int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    if (cp >= 0 && u_isalnum(cp)) {
      current.append(utf8.substr(start, i - start));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// The corpus tokenizer: normalization followed by a unicode-aware split on
// non-alphanumeric runs. Alignment and the metrics share this.
inline std::vector<std::string> tokenize(std::string_view raw) {
  return split_alnum(normalize_text(raw));
}

}  // namespace styleval
