#include <doctest.h>

#include <sstream>

#include "tga/corpus.hpp"
#include "tga/error.hpp"
#include "tga/rng.hpp"

using namespace tga;

namespace {

std::string token_line(int id, const std::string& form, const std::string& upos,
                       const std::string& feats) {
  return std::to_string(id) + "\t" + form + "\t_\t" + upos + "\t_\t" + feats +
         "\t_\t_\t_\t_\n";
}

}  // namespace

TEST_CASE("gender feature mapping") {
  CHECK(gender_from_feats("Gender=Fem|Number=Sing") == GenderTag::F);
  CHECK(gender_from_feats("Case=Nom|Gender=Masc") == GenderTag::M);
  CHECK(gender_from_feats("Gender=Neut") == GenderTag::N);
  CHECK(gender_from_feats("_") == GenderTag::U);
  CHECK(gender_from_feats("Number=Plur") == GenderTag::U);
  // possessor gender is not the token's own gender
  CHECK(gender_from_feats("Gender[psor]=Fem|Poss=Yes") == GenderTag::U);
  CHECK(gender_from_feats("Gender[psor]=Fem|Gender=Masc") == GenderTag::M);
  CHECK(gender_from_feats("Gender=Fem,Masc") == GenderTag::U);
}

TEST_CASE("parse_conllu: one tag per word line") {
  std::string doc = "# sent_id = 1\n" +
                    token_line(1, "Der", "DET", "Gender=Masc") + "\n" +
                    "# sent_id = 2\n" + token_line(1, "ja", "INTJ", "_") +
                    "\n" + token_line(1, "Buch", "NOUN", "Gender=Neut") + "\n";
  std::istringstream in(doc);
  auto sents = parse_conllu(in);
  REQUIRE(sents.size() == 3);
  CHECK(sents[0].tags == std::vector{GenderTag::M});
  CHECK(sents[1].tags == std::vector{GenderTag::U});
  CHECK(sents[2].tags == std::vector{GenderTag::N});
  CHECK(sents[2].pos == std::vector<std::string>{"NOUN"});
}

TEST_CASE("parse_conllu: multiword tokens and empty nodes are skipped") {
  std::string doc = "1-2\tdes\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                    token_line(1, "de", "ADP", "_") +
                    token_line(2, "les", "DET", "Gender=Fem") +
                    "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                    token_line(3, "femmes", "NOUN", "Gender=Fem");
  std::istringstream in(doc);  // no trailing blank line
  auto sents = parse_conllu(in);
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].tokens == Tokens{"de", "les", "femmes"});
  CHECK(sents[0].tags ==
        std::vector{GenderTag::U, GenderTag::F, GenderTag::F});
}

TEST_CASE("parse_conllu: errors carry the line number") {
  SUBCASE("wrong column count") {
    std::istringstream in(token_line(1, "a", "X", "_") + "2\tb\t_\n");
    try {
      parse_conllu(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-contiguous ids") {
    std::istringstream in(token_line(1, "a", "X", "_") +
                          token_line(3, "b", "X", "_"));
    CHECK_THROWS_AS(parse_conllu(in), ParseError);
  }
}

TEST_CASE("write_conllu and parse_conllu round-trip tags, tokens and POS") {
  Rng rng(7);
  std::vector<TaggedSentence> doc;
  for (int s = 0; s < 200; ++s) {
    TaggedSentence t;
    const auto n = 1 + rng.below(12);
    for (std::uint64_t i = 0; i < n; ++i) {
      t.tokens.push_back("w" + std::to_string(rng.below(100)));
      t.tags.push_back(kAllTags[rng.below(4)]);
      t.pos.push_back(rng.below(2) ? "NOUN" : "ADJ");
    }
    doc.push_back(std::move(t));
  }
  std::ostringstream out;
  write_conllu(out, doc);
  std::istringstream in(out.str());
  auto back = parse_conllu(in);
  REQUIRE(back.size() == doc.size());
  for (std::size_t s = 0; s < doc.size(); ++s) {
    CHECK(back[s].tokens == doc[s].tokens);
    CHECK(back[s].tags == doc[s].tags);
    CHECK(back[s].pos == doc[s].pos);
  }
}

TEST_CASE("parse_parallel") {
  SUBCASE("whitespace split") {
    std::istringstream s("a b\n"), t("x y z\n");
    auto pairs = parse_parallel(s, t);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].source.size() == 2);
    CHECK(pairs[0].target.size() == 3);
  }
  SUBCASE("one-sided empty line is skipped and reported") {
    std::string src, tgt;
    for (int i = 1; i <= 10; ++i) {
      src += "s" + std::to_string(i) + "\n";
      tgt += (i == 4 ? std::string("  ") : "t" + std::to_string(i)) + "\n";
    }
    std::istringstream s(src), t(tgt);
    SkipReport report;
    auto pairs = parse_parallel(s, t, &report);
    CHECK(pairs.size() == 9);
    CHECK(report.skipped == 1);
    CHECK(report.lines == std::vector<std::size_t>{4});
    CHECK(pairs.size() + report.skipped == 10);
  }
  SUBCASE("empty files") {
    std::istringstream s(""), t("");
    CHECK(parse_parallel(s, t).empty());
  }
  SUBCASE("unequal line counts name both counts") {
    std::istringstream s("a\nb\nc\n"), t("x\n");
    try {
      parse_parallel(s, t);
      FAIL("expected an error");
    } catch (const Error& e) {
      std::string msg = e.what();
      CHECK(msg.find("3") != std::string::npos);
      CHECK(msg.find("1") != std::string::npos);
    }
  }
  SUBCASE("leading and trailing whitespace is stripped") {
    std::istringstream s("  a  b \n"), t("x\n");
    CHECK(parse_parallel(s, t)[0].source == Tokens{"a", "b"});
  }
}

TEST_CASE("zip_tagged") {
  TaggedSentence tagged{{"Katzen"}, {GenderTag::F}, {}};
  SUBCASE("match") {
    auto out = zip_tagged({RawPair{{"cats"}, {"Katzen"}}}, {tagged});
    REQUIRE(out.size() == 1);
    CHECK(out[0].pair_id == 0);
    CHECK(out[0].target.tags[0] == GenderTag::F);
  }
  SUBCASE("case-sensitive mismatch") {
    tagged.tokens[0] = "katzen";
    try {
      zip_tagged({RawPair{{"cats"}, {"Katzen"}}}, {tagged});
      FAIL("expected mismatch");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("token 0") != std::string::npos);
    }
  }
  SUBCASE("mismatch in a large corpus names the pair") {
    std::vector<RawPair> pairs;
    std::vector<TaggedSentence> tags;
    for (int i = 0; i < 1000; ++i) {
      pairs.push_back({{"s"}, {"w" + std::to_string(i), "x"}});
      tags.push_back({{"w" + std::to_string(i), i == 500 ? "y" : "x"},
                      {GenderTag::U, GenderTag::U},
                      {}});
    }
    try {
      zip_tagged(pairs, tags);
      FAIL("expected mismatch");
    } catch (const Error& e) {
      std::string msg = e.what();
      CHECK(msg.find("pair 500") != std::string::npos);
      CHECK(msg.find("token 1") != std::string::npos);
    }
  }
}
