#include "styleval/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace styleval;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* kTwoValidLines =
    R"({"id":"x1","source":"left","date":"2020-01-05","headline":"Prima  Notizia","article":"Testo uno"})"
    "\n"
    R"({"id":"y1","source":"right","date":"2020-01-06","headline":"Seconda","article":"Testo due"})"
    "\n";

}  // namespace

TEST_CASE("load_corpus loads valid records in order") {
  TempDir tmp("corpus");
  write_file(tmp.path("c.jsonl"), kTwoValidLines);
  Corpus corpus = load_corpus(tmp.path("c.jsonl"));
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.count(Outlet::Left) == 1);
  CHECK(corpus.count(Outlet::Right) == 1);
  CHECK(corpus.items()[0].id == "x1");
  CHECK(corpus.items()[0].headline == "prima notizia");
  CHECK(corpus.items()[1].outlet == Outlet::Right);
  CHECK(corpus.find("y1") != nullptr);
  CHECK(corpus.find("zz") == nullptr);
  CHECK(corpus.unknown_field_warnings == 0);
}

TEST_CASE("load_corpus rejects duplicate ids naming the id") {
  TempDir tmp("corpus");
  write_file(
      tmp.path("c.jsonl"),
      R"({"id":"x1","source":"left","date":"2020-01-05","headline":"a","article":"b"})"
      "\n"
      R"({"id":"x1","source":"right","date":"2020-01-06","headline":"c","article":"d"})"
      "\n");
  CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                    Catch::Matchers::ContainsSubstring("x1") &&
                        Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("load_corpus rejects bad dates naming the line") {
  TempDir tmp("corpus");
  write_file(
      tmp.path("c.jsonl"),
      R"({"id":"x1","source":"left","date":"2019-13-40","headline":"a","article":"b"})"
      "\n");
  CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                    Catch::Matchers::ContainsSubstring("2019-13-40") &&
                        Catch::Matchers::ContainsSubstring(":1"));
}

TEST_CASE("load_corpus rejects records emptied by normalization") {
  TempDir tmp("corpus");
  write_file(
      tmp.path("c.jsonl"),
      R"({"id":"x1","source":"left","date":"2020-01-05","headline":"   ","article":"b"})"
      "\n");
  CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                    Catch::Matchers::ContainsSubstring("headline empty"));
}

TEST_CASE("load_corpus reports malformed json and schema violations") {
  TempDir tmp("corpus");
  SECTION("broken json") {
    write_file(tmp.path("c.jsonl"), "{nope\n");
    CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                      Catch::Matchers::ContainsSubstring("malformed"));
  }
  SECTION("missing field") {
    write_file(tmp.path("c.jsonl"),
               R"({"id":"x1","source":"left","date":"2020-01-05","headline":"a"})"
               "\n");
    CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                      Catch::Matchers::ContainsSubstring("article"));
  }
  SECTION("bad source") {
    write_file(
        tmp.path("c.jsonl"),
        R"({"id":"x1","source":"center","date":"2020-01-05","headline":"a","article":"b"})"
        "\n");
    CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                      Catch::Matchers::ContainsSubstring("center"));
  }
  SECTION("blank line") {
    write_file(tmp.path("c.jsonl"),
               R"({"id":"x1","source":"left","date":"2020-01-05","headline":"a","article":"b"})"
               "\n\n");
    CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                      Catch::Matchers::ContainsSubstring("empty line"));
  }
  SECTION("non-object record") {
    write_file(tmp.path("c.jsonl"), "[1,2]\n");
    CHECK_THROWS_WITH(load_corpus(tmp.path("c.jsonl")),
                      Catch::Matchers::ContainsSubstring("not an object"));
  }
}

TEST_CASE("load_corpus counts unknown fields") {
  TempDir tmp("corpus");
  write_file(
      tmp.path("c.jsonl"),
      R"({"id":"x1","source":"left","date":"2020-01-05","headline":"a","article":"b","extra":1,"more":2})"
      "\n");
  Corpus corpus = load_corpus(tmp.path("c.jsonl"));
  CHECK(corpus.unknown_field_warnings == 2);
}

TEST_CASE("corpus round-trips through save and load") {
  TempDir tmp("corpus");
  write_file(
      tmp.path("c.jsonl"),
      R"({"id":"x1","source":"left","date":"2020-02-29","headline":"Sé perché","article":"Testo  con   spazi"})"
      "\n"
      R"({"id":"y1","source":"right","date":"2020-01-06","headline":"Due","article":"Testo"})"
      "\n");
  Corpus first = load_corpus(tmp.path("c.jsonl"));
  save_corpus(first, tmp.path("round.jsonl"));
  Corpus second = load_corpus(tmp.path("round.jsonl"));
  CHECK(first == second);
  save_corpus(second, tmp.path("round2.jsonl"));
  CHECK(testutil::read_file(tmp.path("round.jsonl")) ==
        testutil::read_file(tmp.path("round2.jsonl")));
}

TEST_CASE("date parsing validates the calendar") {
  CHECK(parse_date("2020-02-29").days == parse_date("2020-03-01").days - 1);
  CHECK(format_date(parse_date("1999-12-31")) == "1999-12-31");
  CHECK(parse_date("2020-01-08").days - parse_date("2020-01-05").days == 3);
  CHECK_THROWS(parse_date("2019-02-29"));
  CHECK_THROWS(parse_date("2019-00-10"));
  CHECK_THROWS(parse_date("2019-1-1"));
  CHECK_THROWS(parse_date("not-a-date"));
  CHECK_THROWS(parse_date("2019-12-32"));
}

TEST_CASE("dates round-trip across a wide range") {
  // every 37 days across ~20 years
  const std::int64_t start = parse_date("2000-01-01").days;
  for (std::int64_t d = start; d < start + 7400; d += 37) {
    CHECK(parse_date(format_date(Date{d})).days == d);
  }
}
