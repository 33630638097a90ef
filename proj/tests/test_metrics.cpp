#include "styleval/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "styleval/rng.hpp"

using namespace styleval;
using oracle::Tokens;

namespace {

MetricConfig bleu_n(int n) {
  MetricConfig config;
  config.bleu_max_n = n;
  return config;
}

Tokens random_tokens(Rng& rng, std::size_t max_len, std::size_t vocab) {
  Tokens tokens;
  const std::size_t len = rng.uniform(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    tokens.push_back("t" + std::to_string(rng.uniform(vocab)));
  }
  return tokens;
}

}  // namespace

TEST_CASE("bleu matches hand-computed micro cases") {
  // identity: every precision 1, BP 1
  CHECK(bleu({{"il", "gatto"}}, {{"il", "gatto"}}, bleu_n(2)) == 1.0);

  // clipped unigrams: "the the the the" vs "the cat sat" -> 1/4, BP 1
  CHECK_THAT(bleu({{"the", "the", "the", "the"}}, {{"the", "cat", "sat"}},
                  bleu_n(1)),
             Catch::Matchers::WithinAbs(0.25, 1e-12));

  // two-pair corpus, BLEU-2: p1 = 5/6, p2 = 3/4, BP = exp(1 - 7/6)
  CHECK_THAT(bleu({{"a", "b", "c", "d"}, {"x", "y"}},
                  {{"a", "b", "c", "d", "e"}, {"x", "z"}}, bleu_n(2)),
             Catch::Matchers::WithinAbs(0.6692025620905963, 1e-9));

  // brevity penalty only: p1 = p2 = 1, BP = exp(1 - 3/2)
  CHECK_THAT(bleu({{"the", "cat"}}, {{"the", "cat", "sat"}}, bleu_n(2)),
             Catch::Matchers::WithinAbs(0.6065306597126334, 1e-9));

  // BLEU-4 with one substitution: 5/6, 3/5, 2/4, 1/3, BP = 1
  CHECK_THAT(bleu({{"a", "b", "c", "d", "e", "f"}},
                  {{"a", "b", "c", "d", "x", "f"}}, bleu_n(4)),
             Catch::Matchers::WithinAbs(0.537284965911771, 1e-9));
}

TEST_CASE("bleu of token-disjoint corpora is epsilon-small") {
  const double score =
      bleu({{"q", "r", "s"}}, {{"t", "u", "v"}}, bleu_n(2));
  CHECK(score > 0.0);
  CHECK(score < 1e-6);
}

TEST_CASE("bleu agrees with the reference implementation on random corpora") {
  Rng rng(31);
  for (int round = 0; round < 60; ++round) {
    const std::size_t pairs = 1 + rng.uniform(6);
    std::vector<Tokens> hyps, refs;
    bool any_hyp_token = false;
    for (std::size_t i = 0; i < pairs; ++i) {
      hyps.push_back(random_tokens(rng, 10, 8));
      refs.push_back(random_tokens(rng, 10, 8));
      any_hyp_token |= !hyps.back().empty();
    }
    if (!any_hyp_token) continue;
    const int max_n = 1 + int(rng.uniform(4));
    const double expected = oracle::reference_bleu(hyps, refs, max_n);
    const double actual = bleu(hyps, refs, bleu_n(max_n));
    CHECK_THAT(actual, Catch::Matchers::WithinAbs(expected, 1e-12));
    CHECK(actual >= 0.0);
    CHECK(actual <= 1.0 + 1e-12);
  }
}

TEST_CASE("bleu is permutation-invariant over the corpus") {
  Rng rng(37);
  std::vector<Tokens> hyps, refs;
  for (int i = 0; i < 8; ++i) {
    hyps.push_back(random_tokens(rng, 8, 5));
    refs.push_back(random_tokens(rng, 8, 5));
  }
  hyps[0] = {"x"};  // ensure nonempty
  const double before = bleu(hyps, refs, bleu_n(3));
  std::vector<std::size_t> order{7, 2, 5, 0, 3, 6, 1, 4};
  std::vector<Tokens> hyps2, refs2;
  for (std::size_t i : order) {
    hyps2.push_back(hyps[i]);
    refs2.push_back(refs[i]);
  }
  CHECK(bleu(hyps2, refs2, bleu_n(3)) == before);
}

TEST_CASE("bleu error cases") {
  CHECK_THROWS(bleu({{"a"}}, {{"a"}, {"b"}}, bleu_n(1)));
  CHECK_THROWS(bleu({}, {}, bleu_n(1)));
  MetricConfig none = bleu_n(2);
  none.bleu_smoothing = BleuSmoothing::None;
  CHECK_THROWS(bleu({{"q"}}, {{"t"}}, none));           // zero matches
  CHECK_THROWS(bleu({{}}, {{"t"}}, none));              // empty hypothesis
  CHECK(bleu({{}}, {{"t"}}, bleu_n(1)) == 0.0);         // smoothed empty
  MetricConfig bad = bleu_n(0);
  CHECK_THROWS(bleu({{"a"}}, {{"a"}}, bad));
}

TEST_CASE("rouge matches hand-computed micro cases") {
  MetricConfig config;

  SECTION("identity scores 1 in every variant") {
    const Tokens x{"una", "frase", "di", "prova"};
    for (RougeVariant variant :
         {RougeVariant::Rouge1, RougeVariant::Rouge2, RougeVariant::RougeL}) {
      config.rouge_variant = variant;
      const RougeScore s = rouge(x, x, config);
      CHECK(s.precision == 1.0);
      CHECK(s.recall == 1.0);
      CHECK(s.f1 == 1.0);
    }
  }

  SECTION("token-disjoint pairs score 0") {
    for (RougeVariant variant :
         {RougeVariant::Rouge1, RougeVariant::Rouge2, RougeVariant::RougeL}) {
      config.rouge_variant = variant;
      const RougeScore s = rouge({"a", "b"}, {"c", "d"}, config);
      CHECK(s.precision == 0.0);
      CHECK(s.recall == 0.0);
      CHECK(s.f1 == 0.0);
    }
  }

  SECTION("rougeL worked example") {
    // LCS("the cat sat", "the cat on the mat") = 2
    const RougeScore s =
        rouge({"the", "cat", "sat"}, {"the", "cat", "on", "the", "mat"},
              config);
    CHECK_THAT(s.precision, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(s.recall, Catch::Matchers::WithinAbs(0.4, 1e-12));
    CHECK_THAT(s.f1, Catch::Matchers::WithinAbs(0.5, 1e-9));
  }

  SECTION("rouge1 with clipping") {
    config.rouge_variant = RougeVariant::Rouge1;
    // hyp {a:2, b:1} vs ref {a:1, b:2}: clipped overlap 2
    const RougeScore s = rouge({"a", "b", "a"}, {"a", "b", "b"}, config);
    CHECK_THAT(s.precision, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(s.recall, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(s.f1, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-9));
  }

  SECTION("rouge2 worked example") {
    config.rouge_variant = RougeVariant::Rouge2;
    // bigrams {ab, bc} vs {bc, cd}: overlap 1
    const RougeScore s = rouge({"a", "b", "c"}, {"b", "c", "d"}, config);
    CHECK_THAT(s.precision, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(s.recall, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(s.f1, Catch::Matchers::WithinAbs(0.5, 1e-9));
  }

  SECTION("rougeL with full recall") {
    const RougeScore s = rouge({"a", "b", "c", "d"}, {"b", "d"}, config);
    CHECK_THAT(s.precision, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(s.recall == 1.0);
    CHECK_THAT(s.f1, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-9));
  }

  SECTION("empty hypothesis yields zeros, empty reference throws") {
    const RougeScore s = rouge({}, {"a"}, config);
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
    CHECK_THROWS(rouge({"a"}, {}, config));
  }
}

TEST_CASE("rouge agrees with the reference implementation on random pairs") {
  Rng rng(41);
  MetricConfig config;
  for (int round = 0; round < 200; ++round) {
    const Tokens hyp = random_tokens(rng, 12, 6);
    Tokens ref = random_tokens(rng, 12, 6);
    if (ref.empty()) ref.push_back("t0");

    config.rouge_variant = RougeVariant::RougeL;
    auto expected = oracle::reference_rouge_l(hyp, ref);
    RougeScore actual = rouge(hyp, ref, config);
    CHECK_THAT(actual.f1, Catch::Matchers::WithinAbs(expected.f1, 1e-12));

    config.rouge_variant = RougeVariant::Rouge2;
    expected = oracle::reference_rouge_n(hyp, ref, 2);
    actual = rouge(hyp, ref, config);
    CHECK_THAT(actual.precision,
               Catch::Matchers::WithinAbs(expected.precision, 1e-12));
    CHECK_THAT(actual.recall,
               Catch::Matchers::WithinAbs(expected.recall, 1e-12));
  }
}

TEST_CASE("rouge_corpus averages per-pair scores") {
  MetricConfig config;
  const RougeScore s = rouge_corpus({{"a", "b"}, {"x"}},
                                    {{"a", "b"}, {"y"}}, config);
  CHECK_THAT(s.f1, Catch::Matchers::WithinAbs(0.5, 1e-12));  // mean of 1 and 0
  CHECK_THROWS(rouge_corpus({}, {}, config));
  CHECK_THROWS(rouge_corpus({{"a"}}, {}, config));
}

TEST_CASE("lcs_length basics and properties") {
  CHECK(lcs_length({"a", "b", "c"}, {"a", "b", "c"}) == 3);
  CHECK(lcs_length({"a", "b", "c"}, {}) == 0);
  CHECK(lcs_length({}, {}) == 0);
  CHECK(lcs_length({"a", "b", "c", "d"}, {"b", "d"}) == 2);

  Rng rng(43);
  for (int round = 0; round < 200; ++round) {
    const Tokens a = random_tokens(rng, 10, 4);
    const Tokens b = random_tokens(rng, 10, 4);
    const std::size_t ab = lcs_length(a, b);
    CHECK(ab == lcs_length(b, a));
    CHECK(ab <= std::min(a.size(), b.size()));
    CHECK(ab == std::size_t(oracle::reference_lcs(a, b)));
  }
}
