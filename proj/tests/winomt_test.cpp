#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tga/error.hpp"
#include "tga/rng.hpp"
#include "tga/winomt.hpp"

using namespace tga;

namespace {

constexpr auto F = GenderTag::F;
constexpr auto M = GenderTag::M;
constexpr auto N = GenderTag::N;
constexpr auto U = GenderTag::U;

WinoMTInstance instance(std::string id, GenderTag gold, Stereotype s) {
  return {std::move(id), {"the", "doctor", "left"}, {1, 2}, gold, s};
}

struct Fixture {
  std::vector<WinoMTInstance> instances;
  std::vector<AntecedentJudgment> judgments;
  void add(GenderTag gold, GenderTag pred, Stereotype s) {
    std::string id = std::to_string(instances.size());
    instances.push_back(instance(id, gold, s));
    judgments.push_back({id, pred, gold == pred});
  }
};

// 4 gold M (3 -> M, 1 -> F), 4 gold F (2 -> F, 2 -> M).
Fixture eight() {
  Fixture f;
  f.add(M, M, Stereotype::kPro);
  f.add(M, M, Stereotype::kPro);
  f.add(M, M, Stereotype::kAnti);
  f.add(M, F, Stereotype::kAnti);
  f.add(F, F, Stereotype::kPro);
  f.add(F, F, Stereotype::kPro);
  f.add(F, M, Stereotype::kAnti);
  f.add(F, M, Stereotype::kAnti);
  return f;
}

GenderTag swap_gender(GenderTag g) {
  return g == M ? F : g == F ? M : g;
}

}  // namespace

TEST_CASE("judge picks the aligned noun") {
  auto inst = instance("0", F, Stereotype::kPro);
  TaggedSentence tr{{"die", "aerztin", "ging"}, {F, F, U}, {"DET", "NOUN", "VERB"}};
  auto j = judge(inst, tr, AlignmentLinkSet(3, 3, {{0, 0}, {1, 1}, {2, 2}}));
  CHECK(j.predicted == F);
  CHECK(j.correct);
}

TEST_CASE("judge: unaligned entity is unknown") {
  auto inst = instance("0", F, Stereotype::kPro);
  TaggedSentence tr{{"die", "aerztin", "ging"}, {F, F, U}, {"DET", "NOUN", "VERB"}};
  auto j = judge(inst, tr, AlignmentLinkSet(3, 3, {{0, 0}, {2, 2}}));
  CHECK(j.predicted == U);
  CHECK_FALSE(j.correct);
  // links beyond the translation are ignored rather than crashing
  auto k = judge(inst, tr, AlignmentLinkSet(3, 9, {{1, 8}}));
  CHECK(k.predicted == U);
}

TEST_CASE("judge: noun preference over permutations of the aligned set") {
  // entity aligned to an ADJ tagged F and a NOUN tagged M, in every order
  // and position; oracle: tag of the leftmost NOUN.
  const std::vector<std::pair<std::string, GenderTag>> items{
      {"ADJ", F}, {"NOUN", M}, {"DET", N}};
  std::vector<std::size_t> perm{0, 1, 2};
  do {
    TaggedSentence tr;
    for (auto k : perm) {
      tr.tokens.push_back("w" + std::to_string(k));
      tr.pos.push_back(items[k].first);
      tr.tags.push_back(items[k].second);
    }
    auto inst = instance("0", M, Stereotype::kPro);
    auto j = judge(inst, tr, AlignmentLinkSet(3, 3, {{1, 0}, {1, 1}, {1, 2}}));
    CHECK(j.predicted == M);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // no noun: leftmost gendered token
  TaggedSentence tr{{"a", "b", "c"}, {U, N, F}, {"DET", "ADJ", "ADJ"}};
  auto inst = instance("0", F, Stereotype::kPro);
  CHECK(judge(inst, tr, AlignmentLinkSet(3, 3, {{1, 0}, {1, 1}, {1, 2}})).predicted == N);
}

TEST_CASE("aggregate: eight-instance fixture") {
  auto f = eight();
  auto r = aggregate(f.instances, f.judgments);
  CHECK(r.accuracy == doctest::Approx(62.5).epsilon(1e-12));
  CHECK(r.masculine.precision == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(r.masculine.recall == doctest::Approx(75.0).epsilon(1e-12));
  CHECK(r.masculine.f1 == doctest::Approx(66.66666666666667).epsilon(1e-12));
  CHECK(r.feminine.precision == doctest::Approx(66.66666666666667).epsilon(1e-12));
  CHECK(r.feminine.recall == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(r.feminine.f1 == doctest::Approx(57.142857142857146).epsilon(1e-12));
  CHECK(r.delta_g == doctest::Approx(9.523809523809526).epsilon(1e-12));
  CHECK(r.mf_ratio == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(r.total == 8);
}

TEST_CASE("aggregate: perfect system") {
  Fixture f;
  f.add(M, M, Stereotype::kPro);
  f.add(F, F, Stereotype::kAnti);
  f.add(F, F, Stereotype::kPro);
  f.add(M, M, Stereotype::kAnti);
  auto r = aggregate(f.instances, f.judgments);
  CHECK(r.accuracy == 100.0);
  CHECK(r.delta_g == 0.0);
  CHECK(r.delta_s == 0.0);
  CHECK(r.masculine.f1 == 100.0);
  CHECK(r.feminine.f1 == 100.0);
}

TEST_CASE("aggregate: stereotype subsets") {
  Fixture f;
  f.add(M, M, Stereotype::kPro);
  f.add(F, F, Stereotype::kPro);
  f.add(M, M, Stereotype::kPro);
  f.add(F, M, Stereotype::kPro);
  f.add(M, M, Stereotype::kAnti);
  f.add(F, F, Stereotype::kAnti);
  f.add(M, F, Stereotype::kAnti);
  f.add(F, U, Stereotype::kAnti);
  auto r = aggregate(f.instances, f.judgments);
  CHECK(r.delta_s == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(r.unknown == 1);
  // unknown is a miss for gold F and never a false positive
  CHECK(r.feminine.recall == doctest::Approx(50.0));
  CHECK(r.masculine.precision == doctest::Approx(75.0));
}

TEST_CASE("aggregate: all-masculine predictions") {
  Fixture f;
  f.add(M, M, Stereotype::kPro);
  f.add(F, M, Stereotype::kAnti);
  auto r = aggregate(f.instances, f.judgments);
  CHECK(r.feminine.recall == 0.0);
  CHECK(std::isinf(r.mf_ratio));
  CHECK(render_report(r, ReportFormat::kText).find("M:F inf") != std::string::npos);
  auto j = nlohmann::json::parse(render_report(r, ReportFormat::kJson));
  CHECK(j["mf_ratio"] == "inf");
  Fixture none;
  none.add(M, U, Stereotype::kPro);
  CHECK(aggregate(none.instances, none.judgments).mf_ratio == 0.0);
}

TEST_CASE("aggregate: id mismatches") {
  auto f = eight();
  auto bad = f.judgments;
  bad[3].id = "nope";
  CHECK_THROWS_AS(aggregate(f.instances, bad), Error);
  bad = f.judgments;
  bad.pop_back();
  CHECK_THROWS_AS(aggregate(f.instances, bad), Error);
  bad = f.judgments;
  bad[1].id = bad[0].id;
  CHECK_THROWS_AS(aggregate(f.instances, bad), Error);
}

TEST_CASE("aggregate properties on random fixtures") {
  Rng rng(123);
  const GenderTag preds[] = {M, F, N, U};
  for (int trial = 0; trial < 300; ++trial) {
    Fixture f;
    const auto n = 1 + rng.below(40);
    for (std::uint64_t k = 0; k < n; ++k)
      f.add(rng.below(2) ? M : F, preds[rng.below(4)],
            rng.below(2) ? Stereotype::kPro : Stereotype::kAnti);
    auto r = aggregate(f.instances, f.judgments);

    std::size_t correct = 0;
    for (const auto& j : f.judgments) correct += j.correct;
    REQUIRE(r.accuracy == 100.0 * static_cast<double>(correct) / static_cast<double>(n));

    Fixture swapped = f;
    for (auto& inst : swapped.instances) inst.gold = swap_gender(inst.gold);
    for (auto& j : swapped.judgments) j.predicted = swap_gender(j.predicted);
    REQUIRE(aggregate(swapped.instances, swapped.judgments).delta_g == -r.delta_g);

    Fixture flipped = f;
    for (auto& inst : flipped.instances)
      inst.stereotype = inst.stereotype == Stereotype::kPro ? Stereotype::kAnti
                                                            : Stereotype::kPro;
    REQUIRE(aggregate(flipped.instances, flipped.judgments).delta_s == -r.delta_s);

    Fixture shuffled = f;
    for (std::size_t k = shuffled.instances.size(); k > 1; --k)
      std::swap(shuffled.instances[k - 1], shuffled.instances[rng.below(k)]);
    auto rs = aggregate(shuffled.instances, shuffled.judgments);
    REQUIRE(rs.accuracy == r.accuracy);
    REQUIRE(rs.delta_g == r.delta_g);
    REQUIRE(rs.delta_s == r.delta_s);
  }
}

TEST_CASE("load_winomt_tsv") {
  SUBCASE("one row") {
    std::istringstream in("female\t1\tThe doctor asked the nurse to help her .\tanti\n");
    auto v = load_winomt_tsv(in);
    REQUIRE(v.size() == 1);
    CHECK(v[0].gold == F);
    CHECK(v[0].entity == MentionSpan{1, 2});
    CHECK(v[0].stereotype == Stereotype::kAnti);
    CHECK(v[0].id == "0");
  }
  SUBCASE("neutral is rejected with the row number") {
    std::istringstream in("male\t1\tThe doctor left .\tpro\nneutral\t1\tThe doctor left .\tpro\n");
    try {
      load_winomt_tsv(in);
      FAIL("expected error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("spans and ids") {
    std::istringstream in("M\t0:2\tThe doctor left .\tpro\tx7\n");
    auto v = load_winomt_tsv(in);
    CHECK(v[0].entity == MentionSpan{0, 2});
    CHECK(v[0].id == "x7");
    std::istringstream bad("M\t3:9\tThe doctor left .\tpro\n");
    CHECK_THROWS_AS(load_winomt_tsv(bad), ParseError);
  }
  SUBCASE("six-row fixture counts") {
    std::istringstream in(
        "male\t1\tThe doctor left because he was late .\tpro\n"
        "female\t1\tThe doctor left because she was late .\tanti\n"
        "female\t1\tThe nurse left because she was late .\tpro\n"
        "male\t1\tThe nurse left because he was late .\tanti\n"
        "male\t1\tThe farmer left because he was late .\tpro\n"
        "female\t1\tThe farmer left because she was late .\tanti\n");
    auto v = load_winomt_tsv(in);
    REQUIRE(v.size() == 6);
    auto count = [&](GenderTag g, Stereotype s) {
      return std::count_if(v.begin(), v.end(), [&](const WinoMTInstance& i) {
        return i.gold == g && i.stereotype == s;
      });
    };
    CHECK(count(M, Stereotype::kPro) == 2);
    CHECK(count(F, Stereotype::kAnti) == 2);
    CHECK(count(F, Stereotype::kPro) == 1);
    CHECK(count(M, Stereotype::kAnti) == 1);
  }
}

TEST_CASE("render_report") {
  MetricsReport r;
  r.accuracy = 66.66666;
  r.delta_g = -0.04;
  auto text = render_report(r, ReportFormat::kText);
  CHECK(text.rfind("Acc. 66.7\n", 0) == 0);
  CHECK(text.find("dG 0.0\n") != std::string::npos);

  auto tsv = render_report(r, ReportFormat::kTsv);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);
  CHECK(tsv.rfind("accuracy\tdelta_g\tdelta_s\tmf_ratio", 0) == 0);

  auto j = nlohmann::json::parse(render_report(eight().instances.empty()
                                                   ? r
                                                   : aggregate(eight().instances,
                                                               eight().judgments),
                                               ReportFormat::kJson));
  CHECK(j["accuracy"].get<double>() == 62.5);
  CHECK(j["delta_g"].get<double>() == 9.5);
  CHECK(j["mf_ratio"].get<double>() == 1.7);
  CHECK(j.begin().key() == "accuracy");
}

TEST_CASE("judgment details tsv") {
  auto f = eight();
  std::ostringstream out;
  write_judgments_tsv(out, f.instances, f.judgments);
  std::string s = out.str();
  CHECK(s.rfind("id\tgold\tpredicted\tcorrect\tstereotype\n", 0) == 0);
  CHECK(s.find("3\tM\tF\tfalse\tanti\n") != std::string::npos);
}
