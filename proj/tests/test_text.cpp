#include "styleval/text.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "styleval/rng.hpp"

using namespace styleval;

namespace {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(char(cp));
  } else if (cp < 0x800) {
    out.push_back(char(0xc0 | (cp >> 6)));
    out.push_back(char(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(char(0xe0 | (cp >> 12)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(char(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(char(0xf0 | (cp >> 18)));
    out.push_back(char(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(char(0x80 | (cp & 0x3f)));
  }
}

std::string random_unicode(Rng& rng, std::size_t length) {
  // Mixed pool: ASCII, accented Latin, combining marks, exotic whitespace,
  // Greek, CJK, an astral-plane character.
  static const char32_t pool[] = {
      U'a',    U'Z',    U'9',    U' ',    U'\t',   U'\n',  U',',   U'!',
      U'à',    U'é',    U'È',    U'ß',    U'Ñ',    0x0301,  0x0300, 0x0327,
      0x00a0,  0x2003,  U'λ',    U'Ω',    U'中',   U'文',  0x1F600};
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    append_utf8(out, pool[rng.uniform(sizeof(pool) / sizeof(pool[0]))]);
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_text lowercases and collapses whitespace") {
  CHECK(normalize_text("  La  CASA ") == "la casa");
  CHECK(normalize_text("a\t\nb") == "a b");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("   ") == "");
}

TEST_CASE("normalize_text composes canonically") {
  const std::string composed = "\xc3\xa9";        // precomposed e-acute
  const std::string decomposed = "e\xcc\x81";     // e + combining acute
  CHECK(normalize_text(composed) == normalize_text(decomposed));
  CHECK(normalize_text(decomposed) == composed);
}

TEST_CASE("normalize_text keeps case when asked") {
  NormalizeConfig keep_case{.lowercase = false};
  CHECK(normalize_text("La CASA", keep_case) == "La CASA");
}

TEST_CASE("normalize_text is idempotent on random unicode") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const std::string raw = random_unicode(rng, rng.uniform(40));
    const std::string once = normalize_text(raw);
    CHECK(normalize_text(once) == once);
    NormalizeConfig keep_case{.lowercase = false};
    const std::string once_cased = normalize_text(raw, keep_case);
    CHECK(normalize_text(once_cased, keep_case) == once_cased);
  }
}

TEST_CASE("tokenize splits on non-alphanumeric runs") {
  CHECK(tokenize("Ciao, mondo! 42") ==
        std::vector<std::string>{"ciao", "mondo", "42"});
  CHECK(tokenize("perché è così") ==
        std::vector<std::string>{"perché", "è", "così"});
  CHECK(tokenize("--- ...") == std::vector<std::string>{});
  CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("split_alnum does not change case") {
  CHECK(split_alnum("Ciao Mondo") ==
        std::vector<std::string>{"Ciao", "Mondo"});
}
