#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "synthetic.hpp"
#include "tga/align.hpp"
#include "tga/error.hpp"

using namespace tga;

namespace {

std::vector<RawPair> repeat(const RawPair& p, int times) {
  return std::vector<RawPair>(static_cast<std::size_t>(times), p);
}

// Reference EM kept deliberately naive: string-keyed maps, one pass over the
// corpus, no sharding and a closed-form prior written out from the model
// definition. Tension is frozen.
struct NaiveModel {
  std::map<std::pair<std::string, std::string>, double> t;  // (e, f)
  std::vector<double> log_likelihood;
};

NaiveModel naive_em(const std::vector<RawPair>& corpus, int iterations,
                    double tension, double p0) {
  const std::string null = "\x01null";
  NaiveModel model;
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& p : corpus)
    for (const auto& f : p.target) {
      cooc[null].insert(f);
      for (const auto& e : p.source) cooc[e].insert(f);
    }
  for (const auto& [e, fs] : cooc)
    for (const auto& f : fs) model.t[{e, f}] = 1.0 / static_cast<double>(fs.size());

  for (int it = 0; it < iterations; ++it) {
    std::map<std::pair<std::string, std::string>, double> counts;
    double ll = 0.0;
    for (const auto& p : corpus) {
      const double n = static_cast<double>(p.source.size());
      const double m = static_cast<double>(p.target.size());
      for (std::size_t j = 1; j <= p.target.size(); ++j) {
        const auto& f = p.target[j - 1];
        double z = 0.0;
        for (std::size_t i = 1; i <= p.source.size(); ++i)
          z += std::exp(-tension * std::abs(double(i) / n - double(j) / m));
        std::vector<double> joint(p.source.size() + 1);
        joint[0] = p0 * model.t[{null, f}];
        double sum = joint[0];
        for (std::size_t i = 1; i <= p.source.size(); ++i) {
          const double prior =
              (1 - p0) *
              std::exp(-tension * std::abs(double(i) / n - double(j) / m)) / z;
          joint[i] = prior * model.t[{p.source[i - 1], f}];
          sum += joint[i];
        }
        ll += std::log(sum);
        counts[{null, f}] += joint[0] / sum;
        for (std::size_t i = 1; i <= p.source.size(); ++i)
          counts[{p.source[i - 1], f}] += joint[i] / sum;
      }
    }
    model.log_likelihood.push_back(ll);
    std::map<std::string, double> totals;
    for (const auto& [k, c] : counts) totals[k.first] += c;
    for (auto& [k, prob] : model.t) prob = counts[k] / totals[k.first];
  }
  return model;
}

AlignerConfig frozen(int iterations = 5) {
  AlignerConfig c;
  c.iterations = iterations;
  c.optimize_tension = false;
  return c;
}

std::vector<RawPair> disambiguation_corpus() {
  std::vector<RawPair> corpus = repeat({{"a", "b"}, {"x", "y"}}, 100);
  auto a = repeat({{"a"}, {"x"}}, 100);
  auto b = repeat({{"b"}, {"y"}}, 100);
  corpus.insert(corpus.end(), a.begin(), a.end());
  corpus.insert(corpus.end(), b.begin(), b.end());
  return corpus;
}

}  // namespace

TEST_CASE("config validation") {
  AlignerConfig c;
  CHECK_NOTHROW(c.validate());
  c.null_probability = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.diagonal_tension = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("empty corpus is rejected") {
  std::vector<RawPair> empty;
  CHECK_THROWS_AS(train(empty, AlignerConfig{}, Direction::kSourceToTarget),
                  Error);
}

TEST_CASE("single pair: t(x|a) = 1 after one iteration") {
  std::vector<RawPair> corpus{{{"a"}, {"x"}}};
  auto model = train(corpus, frozen(1), Direction::kSourceToTarget);
  CHECK(model.table.prob("a", "x") == doctest::Approx(1.0));
  CHECK(write_pharaoh(viterbi_pair(model, corpus[0])) == "0-0");
}

TEST_CASE("diagonal prior is normalised and peaks on the diagonal") {
  std::vector<double> prior;
  diagonal_prior(3, 5, 5, 4.0, prior);
  double sum = 0;
  for (double p : prior) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::max_element(prior.begin(), prior.end()) - prior.begin() == 2);
  // huge tension must not overflow or produce NaN
  diagonal_prior(1, 40, 40, 1e4, prior);
  CHECK(prior[0] == doctest::Approx(1.0));
}

TEST_CASE("trained table matches the naive reference EM") {
  auto corpus = testing::random_corpus(60, 8, 3);
  auto reference = naive_em(corpus, 4, 4.0, 0.08);
  auto model = train(corpus, frozen(4), Direction::kSourceToTarget);
  REQUIRE(model.history.size() == 4);
  for (int it = 0; it < 4; ++it)
    CHECK(model.history[static_cast<std::size_t>(it)].log_likelihood ==
          doctest::Approx(reference.log_likelihood[static_cast<std::size_t>(it)])
              .epsilon(1e-10));
  for (const auto& [key, prob] : reference.t) {
    if (key.first[0] == '\x01') {
      auto f = model.table.generated_vocab().find(key.second);
      CHECK(model.table.prob(TranslationTable::kNullWord, f) ==
            doctest::Approx(prob).epsilon(1e-10));
    } else {
      CHECK(model.table.prob(key.first, key.second) ==
            doctest::Approx(prob).epsilon(1e-10));
    }
  }
}

TEST_CASE("singleton pairs disambiguate the two-word pair") {
  auto corpus = disambiguation_corpus();
  for (bool optimize : {false, true}) {
    AlignerConfig c;
    c.optimize_tension = optimize;
    auto fwd = train(corpus, c, Direction::kSourceToTarget);
    auto bwd = train(corpus, c, Direction::kTargetToSource);
    RawPair p{{"a", "b"}, {"x", "y"}};
    CHECK(write_pharaoh(viterbi_pair(fwd, p)) == "0-0 1-1");
    CHECK(write_pharaoh(viterbi_pair(bwd, p)) == "0-0 1-1");
    // independent check from the naive reference table
    auto ref = naive_em(corpus, 5, 4.0, 0.08);
    CHECK(ref.t[{"a", "x"}] > ref.t[{"a", "y"}]);
    CHECK(fwd.table.prob("a", "x") == doctest::Approx(ref.t[{"a", "x"}]).epsilon(optimize ? 1e-2 : 1e-10));
  }
}

TEST_CASE("EM log-likelihood is non-decreasing with frozen tension") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto corpus = testing::random_corpus(300, 20, seed);
    auto model = train(corpus, frozen(8), Direction::kSourceToTarget,
                       [](const IterationStats& s, const TranslationTable& t) {
                         CHECK(t.max_row_deviation() < 1e-6);
                         CHECK(s.max_row_deviation < 1e-6);
                       });
    for (std::size_t k = 1; k < model.history.size(); ++k)
      CHECK(model.history[k].log_likelihood >=
            model.history[k - 1].log_likelihood - 1e-9);
  }
}

TEST_CASE("tension stays within bounds when optimised") {
  auto corpus = testing::bijective_corpus(300, 20, 3, 8, 5).pairs;
  auto model = train(corpus, AlignerConfig{}, Direction::kSourceToTarget);
  for (const auto& s : model.history) {
    CHECK(s.tension >= kMinTension);
    CHECK(s.tension <= kMaxTension);
  }
  // a perfectly monotone corpus pulls the tension up from its start value
  CHECK(model.tension > 4.0);
}

TEST_CASE("viterbi matches brute-force enumeration of full alignments") {
  auto corpus = testing::random_corpus(80, 6, 9);
  auto model = train(corpus, AlignerConfig{}, Direction::kSourceToTarget);
  for (std::size_t k = 0; k < 20; ++k) {
    const auto& p = corpus[k];
    const std::size_t n = p.source.size(), m = p.target.size();
    if (m > 5) continue;
    // enumerate every a in {0..n}^m, 0 = null
    std::vector<std::size_t> a(m, 0), best;
    double best_score = -1;
    for (;;) {
      double score = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> prior;
        diagonal_prior(j + 1, m, n, model.tension, prior);
        score *= a[j] == 0
                     ? model.null_probability *
                           model.table.prob(TranslationTable::kNullWord,
                                            model.table.generated_vocab().find(p.target[j]))
                     : (1 - model.null_probability) * prior[a[j] - 1] *
                           model.table.prob(p.source[a[j] - 1], p.target[j]);
      }
      if (score > best_score) {
        best_score = score;
        best = a;
      }
      std::size_t j = 0;
      while (j < m && ++a[j] > n) a[j++] = 0;
      if (j == m) break;
    }
    std::vector<Link> expected;
    for (std::size_t j = 0; j < m; ++j)
      if (best[j] > 0) expected.push_back({best[j] - 1, j});
    CHECK(viterbi_pair(model, p) == AlignmentLinkSet(n, m, expected));
  }
}

TEST_CASE("viterbi: null wins when no source word can generate the target") {
  AlignmentModel model;
  model.null_probability = 0.99;
  auto& t = model.table;
  t.conditioning_vocab().intern("a");
  t.generated_vocab().intern("x");
  t.generated_vocab().intern("y");
  t.assign({0, 2, 4}, {0, 1, 0, 1}, {0.5, 0.5, 1.0, 0.0});
  CHECK(viterbi(model, {"a"}, {"y"}).empty());
  model.null_probability = 0.08;
  CHECK(viterbi(model, {"a"}, {"y"}).empty());
  CHECK(write_pharaoh(viterbi(model, {"a"}, {"x"})) == "0-0");
}

TEST_CASE("viterbi: unseen words fall back to the diagonal prior") {
  auto corpus = disambiguation_corpus();
  auto model = train(corpus, AlignerConfig{}, Direction::kSourceToTarget);
  CHECK(model.table.prob("zzz", "x") == kProbabilityFloor);
  CHECK(write_pharaoh(viterbi(model, {"p", "q", "r"}, {"u", "v", "w"})) ==
        "0-0 1-1 2-2");
}

TEST_CASE("training is bitwise identical across thread counts") {
  auto corpus = testing::random_corpus(2000, 40, 17);
  auto run = [&](unsigned threads) {
    AlignerConfig c;
    c.threads = threads;
    std::ostringstream out;
    auto model = train(corpus, c, Direction::kSourceToTarget);
    write_model(out, model);
    std::string links;
    for (std::size_t k = 0; k < 200; ++k)
      links += write_pharaoh(viterbi_pair(model, corpus[k])) + "\n";
    return out.str() + links;
  };
  const std::string one = run(1);
  CHECK(run(2) == one);
  CHECK(run(8) == one);
}

TEST_CASE("model dump round trip") {
  auto corpus = testing::random_corpus(100, 10, 4);
  auto model = train(corpus, AlignerConfig{}, Direction::kTargetToSource);
  std::stringstream buf;
  write_model(buf, model);
  auto back = read_model(buf);
  CHECK(back.direction == Direction::kTargetToSource);
  CHECK(back.tension == model.tension);
  CHECK(back.null_probability == model.null_probability);
  REQUIRE(back.table.entries() == model.table.entries());
  for (std::size_t k = 0; k < model.table.entries(); ++k)
    CHECK(back.table.entry_prob(k) == model.table.entry_prob(k));
  for (const auto& p : corpus) CHECK(viterbi_pair(back, p) == viterbi_pair(model, p));

  std::istringstream bad("tga-align-model 99\n");
  CHECK_THROWS_AS(read_model(bad), ParseError);
}
