#include "tga/align.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "tga/error.hpp"
#include "tga/parallel.hpp"
#include "tga/text.hpp"

namespace tga {

void AlignerConfig::validate() const {
  if (iterations < 1) throw Error("aligner iterations must be >= 1");
  if (!(diagonal_tension > 0.0))
    throw Error("diagonal tension must be positive");
  if (!(null_probability > 0.0 && null_probability < 1.0))
    throw Error("null probability must be in (0, 1)");
}

std::string_view to_string(Direction d) {
  return d == Direction::kSourceToTarget ? "source-to-target"
                                         : "target-to-source";
}

Vocabulary::Id Vocabulary::intern(const std::string& word) {
  auto [it, inserted] = ids_.try_emplace(word, static_cast<Id>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

Vocabulary::Id Vocabulary::add_reserved(const std::string& word) {
  words_.push_back(word);
  return static_cast<Id>(words_.size() - 1);
}

Vocabulary::Id Vocabulary::find(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnknown : it->second;
}

TranslationTable::TranslationTable() : row_start_{0} {
  e_vocab_.add_reserved("<null>");
}

void TranslationTable::assign(std::vector<std::size_t> row_start,
                              std::vector<Vocabulary::Id> cols,
                              std::vector<double> probs) {
  row_start_ = std::move(row_start);
  cols_ = std::move(cols);
  probs_ = std::move(probs);
}

std::size_t TranslationTable::entry_index(Vocabulary::Id e,
                                          Vocabulary::Id f) const {
  if (e >= rows()) return SIZE_MAX;
  auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[e]);
  auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[e + 1]);
  auto it = std::lower_bound(first, last, f);
  if (it == last || *it != f) return SIZE_MAX;
  return static_cast<std::size_t>(it - cols_.begin());
}

double TranslationTable::prob(Vocabulary::Id e, Vocabulary::Id f) const {
  std::size_t k = entry_index(e, f);
  return k == SIZE_MAX ? 0.0 : probs_[k];
}

double TranslationTable::prob(const std::string& e,
                              const std::string& f) const {
  auto ei = e_vocab_.find(e);
  auto fi = f_vocab_.find(f);
  if (ei == Vocabulary::kUnknown || fi == Vocabulary::kUnknown)
    return kProbabilityFloor;
  std::size_t k = entry_index(ei, fi);
  return k == SIZE_MAX ? kProbabilityFloor : probs_[k];
}

double TranslationTable::max_row_deviation() const {
  double worst = 0.0;
  for (std::size_t e = 0; e < rows(); ++e) {
    if (row_start_[e] == row_start_[e + 1]) continue;
    double sum = 0.0;
    for (std::size_t k = row_start_[e]; k < row_start_[e + 1]; ++k)
      sum += probs_[k];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double diagonal_feature(std::size_t i, std::size_t j, std::size_t n,
                        std::size_t m) {
  return -std::abs(static_cast<double>(i) / static_cast<double>(n) -
                   static_cast<double>(j) / static_cast<double>(m));
}

void diagonal_prior(std::size_t j, std::size_t m, std::size_t n, double tension,
                    std::vector<double>& out) {
  out.resize(n);
  double hmax = -INFINITY;
  for (std::size_t i = 1; i <= n; ++i)
    hmax = std::max(hmax, diagonal_feature(i, j, n, m));
  double z = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    out[i - 1] = std::exp(tension * (diagonal_feature(i, j, n, m) - hmax));
    z += out[i - 1];
  }
  for (double& p : out) p /= z;
}

namespace {

// Sentences per E-step shard. Fixed so the summation order, and therefore
// every count, is independent of the thread count.
constexpr std::size_t kShardSize = 512;
constexpr int kTensionSteps = 8;
constexpr double kTensionStepSize = 20.0;

using Id = Vocabulary::Id;
using ShapeKey = std::pair<std::size_t, std::size_t>;  // (m, n)

struct EncodedPair {
  std::vector<Id> e;
  std::vector<Id> f;
};

struct ShardTotals {
  double log_likelihood = 0.0;
  double emp_feature = 0.0;
  double null_mass = 0.0;
  double tokens = 0.0;
  // Non-null posterior mass per target position, by sentence shape.
  std::map<ShapeKey, std::vector<double>> nonnull_mass;
};

// Per-worker dense count buffer with a list of touched cells so clearing
// costs O(touched).
struct CountBuffer {
  std::vector<double> counts;
  std::vector<char> touched_flag;
  std::vector<std::size_t> touched;

  explicit CountBuffer(std::size_t entries)
      : counts(entries, 0.0), touched_flag(entries, 0) {}

  void add(std::size_t k, double v) {
    if (!touched_flag[k]) {
      touched_flag[k] = 1;
      touched.push_back(k);
    }
    counts[k] += v;
  }

  void drain_into(std::vector<double>& global) {
    std::sort(touched.begin(), touched.end());
    for (std::size_t k : touched) {
      global[k] += counts[k];
      counts[k] = 0.0;
      touched_flag[k] = 0;
    }
    touched.clear();
  }
};

std::vector<EncodedPair> encode(std::span<const RawPair> corpus,
                                Direction direction, TranslationTable& table) {
  std::vector<EncodedPair> out;
  out.reserve(corpus.size());
  for (const RawPair& pair : corpus) {
    const Tokens& e = direction == Direction::kSourceToTarget ? pair.source
                                                              : pair.target;
    const Tokens& f = direction == Direction::kSourceToTarget ? pair.target
                                                              : pair.source;
    if (e.empty() || f.empty())
      throw Error("aligner input contains a pair with an empty side");
    EncodedPair enc;
    enc.e.reserve(e.size());
    enc.f.reserve(f.size());
    for (const auto& w : e) enc.e.push_back(table.conditioning_vocab().intern(w));
    for (const auto& w : f) enc.f.push_back(table.generated_vocab().intern(w));
    out.push_back(std::move(enc));
  }
  return out;
}

// Builds the sparse layout from co-occurrences and sets every row uniform.
void init_table(const std::vector<EncodedPair>& corpus,
                TranslationTable& table) {
  const std::size_t rows = table.conditioning_vocab().size();
  std::vector<std::vector<Id>> cooc(rows);
  std::vector<Id> fs;
  for (const auto& p : corpus) {
    fs = p.f;
    std::sort(fs.begin(), fs.end());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    std::vector<Id> es = p.e;
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    cooc[TranslationTable::kNullWord].insert(
        cooc[TranslationTable::kNullWord].end(), fs.begin(), fs.end());
    for (Id e : es) cooc[e].insert(cooc[e].end(), fs.begin(), fs.end());
  }
  std::vector<std::size_t> row_start{0};
  std::vector<Id> cols;
  std::vector<double> probs;
  for (auto& row : cooc) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    const double p = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
    cols.insert(cols.end(), row.begin(), row.end());
    probs.insert(probs.end(), row.size(), p);
    row_start.push_back(cols.size());
    std::vector<Id>().swap(row);
  }
  table.assign(std::move(row_start), std::move(cols), std::move(probs));
}

void estep_pair(const EncodedPair& p, const TranslationTable& table,
                double tension, double p0, CountBuffer& buf,
                ShardTotals& totals, std::vector<double>& prior,
                std::vector<double>& post, std::vector<std::size_t>& idx) {
  const std::size_t n = p.e.size(), m = p.f.size();
  auto& nonnull = totals.nonnull_mass[{m, n}];
  if (nonnull.empty()) nonnull.assign(m, 0.0);
  post.resize(n + 1);
  idx.resize(n + 1);
  for (std::size_t j = 1; j <= m; ++j) {
    const Id f = p.f[j - 1];
    diagonal_prior(j, m, n, tension, prior);
    idx[0] = table.entry_index(TranslationTable::kNullWord, f);
    post[0] = p0 * table.entry_prob(idx[0]);
    double sum = post[0];
    for (std::size_t i = 1; i <= n; ++i) {
      idx[i] = table.entry_index(p.e[i - 1], f);
      post[i] = (1.0 - p0) * prior[i - 1] * table.entry_prob(idx[i]);
      sum += post[i];
    }
    if (!(sum > 0.0)) sum = std::numeric_limits<double>::min();
    totals.log_likelihood += std::log(sum);
    totals.tokens += 1.0;
    const double q_null = post[0] / sum;
    buf.add(idx[0], q_null);
    totals.null_mass += q_null;
    nonnull[j - 1] += 1.0 - q_null;
    for (std::size_t i = 1; i <= n; ++i) {
      const double q = post[i] / sum;
      buf.add(idx[i], q);
      totals.emp_feature += diagonal_feature(i, j, n, m) * q;
    }
  }
}

void merge_totals(ShardTotals& into, ShardTotals&& from) {
  into.log_likelihood += from.log_likelihood;
  into.emp_feature += from.emp_feature;
  into.null_mass += from.null_mass;
  into.tokens += from.tokens;
  for (auto& [shape, mass] : from.nonnull_mass) {
    auto& dst = into.nonnull_mass[shape];
    if (dst.empty()) dst.assign(mass.size(), 0.0);
    for (std::size_t j = 0; j < mass.size(); ++j) dst[j] += mass[j];
  }
}

double expected_model_feature(
    const std::map<ShapeKey, std::vector<double>>& nonnull, double tension,
    double tokens) {
  std::vector<double> prior;
  double total = 0.0;
  for (const auto& [shape, mass] : nonnull) {
    const auto [m, n] = shape;
    for (std::size_t j = 1; j <= m; ++j) {
      diagonal_prior(j, m, n, tension, prior);
      double expected = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        expected += prior[i - 1] * diagonal_feature(i, j, n, m);
      total += mass[j - 1] * expected;
    }
  }
  return total / tokens;
}

}  // namespace

AlignmentModel train(std::span<const RawPair> corpus,
                     const AlignerConfig& config, Direction direction,
                     const IterationCallback& on_iteration) {
  config.validate();
  if (corpus.empty()) throw Error("cannot train aligner on an empty corpus");

  AlignmentModel model;
  model.direction = direction;
  model.tension = config.diagonal_tension;
  model.null_probability = config.null_probability;
  TranslationTable& table = model.table;

  const std::vector<EncodedPair> data = encode(corpus, direction, table);
  init_table(data, table);

  const std::size_t shards = (data.size() + kShardSize - 1) / kShardSize;
  const unsigned threads = std::max(1u, config.threads);
  std::vector<CountBuffer> buffers;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, shards); ++t)
    buffers.emplace_back(table.entries());

  for (int iter = 1; iter <= config.iterations; ++iter) {
    std::vector<double> counts(table.entries(), 0.0);
    ShardTotals totals;
    for (std::size_t wave = 0; wave < shards; wave += buffers.size()) {
      const std::size_t wave_size = std::min(buffers.size(), shards - wave);
      std::vector<ShardTotals> shard_totals(wave_size);
      parallel_for(wave_size, threads, [&](std::size_t slot) {
        const std::size_t shard = wave + slot;
        const std::size_t begin = shard * kShardSize;
        const std::size_t end = std::min(data.size(), begin + kShardSize);
        std::vector<double> prior, post;
        std::vector<std::size_t> idx;
        for (std::size_t s = begin; s < end; ++s)
          estep_pair(data[s], table, model.tension, model.null_probability,
                     buffers[slot], shard_totals[slot], prior, post, idx);
      });
      for (std::size_t slot = 0; slot < wave_size; ++slot) {
        buffers[slot].drain_into(counts);
        merge_totals(totals, std::move(shard_totals[slot]));
      }
    }

    // M-step: renormalize each conditioning row.
    for (std::size_t e = 0; e < table.rows(); ++e) {
      const std::size_t b = table.row_begin(e), end = table.row_begin(e + 1);
      double row_total = 0.0;
      for (std::size_t k = b; k < end; ++k) row_total += counts[k];
      if (!(row_total > 0.0)) continue;
      for (std::size_t k = b; k < end; ++k)
        table.set_entry_prob(k, counts[k] / row_total);
    }

    if (config.optimize_tension && iter >= 2) {
      const double emp = totals.emp_feature / totals.tokens;
      for (int step = 0; step < kTensionSteps; ++step) {
        const double mod = expected_model_feature(totals.nonnull_mass,
                                                  model.tension, totals.tokens);
        model.tension += (emp - mod) * kTensionStepSize;
        model.tension = std::clamp(model.tension, kMinTension, kMaxTension);
      }
    }

    IterationStats stats;
    stats.iteration = iter;
    stats.log_likelihood = totals.log_likelihood;
    stats.tension = model.tension;
    stats.posterior_null = totals.null_mass / totals.tokens;
    stats.max_row_deviation = table.max_row_deviation();
    model.history.push_back(stats);
    if (on_iteration) on_iteration(stats, table);
  }
  return model;
}

AlignmentLinkSet viterbi(const AlignmentModel& model,
                         const Tokens& conditioning, const Tokens& generated) {
  const TranslationTable& table = model.table;
  const std::size_t n = conditioning.size(), m = generated.size();
  AlignmentLinkSet out(n, m);
  if (n == 0 || m == 0) return out;
  const double p0 = model.null_probability;

  std::vector<Id> e_ids(n);
  for (std::size_t i = 0; i < n; ++i)
    e_ids[i] = table.conditioning_vocab().find(conditioning[i]);
  auto lookup = [&](Id e, Id f) {
    if (e == Vocabulary::kUnknown || f == Vocabulary::kUnknown)
      return kProbabilityFloor;
    std::size_t k = table.entry_index(e, f);
    return k == SIZE_MAX ? kProbabilityFloor : table.entry_prob(k);
  };

  std::vector<double> prior;
  std::vector<Link> links;
  for (std::size_t j = 1; j <= m; ++j) {
    const Id f = table.generated_vocab().find(generated[j - 1]);
    diagonal_prior(j, m, n, model.tension, prior);
    double best = p0 * lookup(TranslationTable::kNullWord, f);
    std::size_t best_i = 0;  // 0 is null
    for (std::size_t i = 1; i <= n; ++i) {
      const double score = (1.0 - p0) * prior[i - 1] * lookup(e_ids[i - 1], f);
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    if (best_i > 0) links.push_back({best_i - 1, j - 1});
  }
  return AlignmentLinkSet(n, m, std::move(links));
}

AlignmentLinkSet viterbi_pair(const AlignmentModel& model,
                              const RawPair& pair) {
  return model.direction == Direction::kSourceToTarget
             ? viterbi(model, pair.source, pair.target)
             : viterbi(model, pair.target, pair.source);
}

namespace {

constexpr std::string_view kModelMagic = "tga-align-model";
constexpr int kModelVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

class ModelParser {
 public:
  explicit ModelParser(std::istream& in) : in_(in) {}

  std::vector<std::string> fields() {
    std::string line;
    if (!read_line(in_, line))
      throw ParseError("unexpected end of model file", line_no_ + 1);
    ++line_no_;
    return split_whitespace(line);
  }

  std::string keyed(std::string_view key) {
    auto f = fields();
    if (f.size() != 2 || f[0] != key)
      throw ParseError("expected '" + std::string(key) + " <value>'", line_no_);
    return f[1];
  }

  std::size_t keyed_size(std::string_view key) {
    std::size_t v = 0;
    if (!parse_size(keyed(key), v))
      throw ParseError("invalid count for '" + std::string(key) + "'",
                       line_no_);
    return v;
  }

  double to_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError("invalid number '" + s + "'", line_no_);
    return v;
  }

  std::string word() {
    std::string line;
    if (!read_line(in_, line))
      throw ParseError("unexpected end of model file", line_no_ + 1);
    ++line_no_;
    if (!is_valid_surface(line)) throw ParseError("invalid vocabulary entry", line_no_);
    return line;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const AlignmentModel& model) {
  const TranslationTable& t = model.table;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "direction " << to_string(model.direction) << '\n';
  out << "tension " << format_double(model.tension) << '\n';
  out << "null_probability " << format_double(model.null_probability) << '\n';
  out << "conditioning_vocab " << t.conditioning_vocab().size() << '\n';
  for (std::size_t i = 0; i < t.conditioning_vocab().size(); ++i)
    out << t.conditioning_vocab().word(static_cast<Id>(i)) << '\n';
  out << "generated_vocab " << t.generated_vocab().size() << '\n';
  for (std::size_t i = 0; i < t.generated_vocab().size(); ++i)
    out << t.generated_vocab().word(static_cast<Id>(i)) << '\n';
  out << "entries " << t.entries() << '\n';
  for (std::size_t e = 0; e < t.rows(); ++e)
    for (std::size_t k = t.row_begin(e); k < t.row_begin(e + 1); ++k)
      out << e << ' ' << t.entry_word(k) << ' ' << format_double(t.entry_prob(k))
          << '\n';
}

AlignmentModel read_model(std::istream& in) {
  ModelParser p(in);
  auto header = p.fields();
  if (header.size() != 2 || header[0] != kModelMagic)
    throw ParseError("not an alignment model file", p.line());
  if (header[1] != std::to_string(kModelVersion))
    throw ParseError("unsupported model version " + header[1], p.line());

  AlignmentModel model;
  std::string dir = p.keyed("direction");
  if (dir == to_string(Direction::kSourceToTarget))
    model.direction = Direction::kSourceToTarget;
  else if (dir == to_string(Direction::kTargetToSource))
    model.direction = Direction::kTargetToSource;
  else
    throw ParseError("unknown direction '" + dir + "'", p.line());
  model.tension = p.to_double(p.keyed("tension"));
  model.null_probability = p.to_double(p.keyed("null_probability"));

  TranslationTable& t = model.table;
  const std::size_t ne = p.keyed_size("conditioning_vocab");
  if (ne == 0) throw ParseError("conditioning vocabulary lacks the null word", p.line());
  p.word();  // null word, already reserved
  for (std::size_t i = 1; i < ne; ++i) {
    std::string w = p.word();
    if (t.conditioning_vocab().intern(w) != i)
      throw ParseError("duplicate vocabulary entry '" + w + "'", p.line());
  }
  const std::size_t nf = p.keyed_size("generated_vocab");
  for (std::size_t i = 0; i < nf; ++i) {
    std::string w = p.word();
    if (t.generated_vocab().intern(w) != i)
      throw ParseError("duplicate vocabulary entry '" + w + "'", p.line());
  }
  const std::size_t entries = p.keyed_size("entries");
  std::vector<std::size_t> row_start(ne + 1, 0);
  std::vector<Id> cols;
  std::vector<double> probs;
  cols.reserve(entries);
  probs.reserve(entries);
  std::size_t prev_e = 0;
  for (std::size_t k = 0; k < entries; ++k) {
    auto f = p.fields();
    std::size_t e = 0, fw = 0;
    if (f.size() != 3 || !parse_size(f[0], e) || !parse_size(f[1], fw))
      throw ParseError("malformed table entry", p.line());
    if (e >= ne || fw >= nf)
      throw ParseError("table entry refers to an unknown word", p.line());
    if (k > 0 && (e < prev_e || (e == prev_e && fw <= cols.back())))
      throw ParseError("table entries are not sorted", p.line());
    const double prob = p.to_double(f[2]);
    if (!(prob >= 0.0 && prob <= 1.0))
      throw ParseError("probability out of range", p.line());
    ++row_start[e + 1];
    cols.push_back(static_cast<Id>(fw));
    probs.push_back(prob);
    prev_e = e;
  }
  for (std::size_t e = 0; e < ne; ++e) row_start[e + 1] += row_start[e];
  t.assign(std::move(row_start), std::move(cols), std::move(probs));
  return model;
}

}  // namespace tga
