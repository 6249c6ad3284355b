#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tga/corpus.hpp"
#include "tga/links.hpp"

namespace tga {

struct AlignerConfig {
  int iterations = 5;
  double diagonal_tension = 4.0;
  double null_probability = 0.08;
  bool optimize_tension = true;
  // EM is deterministic; the seed is kept so configs round-trip and for
  // future randomized initialization.
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // Throws tga::Error when a parameter is out of range.
  void validate() const;
};

// Bounds applied to the learned diagonal tension.
inline constexpr double kMinTension = 0.5;
inline constexpr double kMaxTension = 14.0;
// Translation probability used for word pairs never seen together.
inline constexpr double kProbabilityFloor = 1e-9;

enum class Direction { kSourceToTarget, kTargetToSource };

std::string_view to_string(Direction d);

class Vocabulary {
 public:
  using Id = std::uint32_t;
  static constexpr Id kUnknown = UINT32_MAX;

  Id intern(const std::string& word);
  // Appends a word that lookups never return, e.g. the null word.
  Id add_reserved(const std::string& word);
  Id find(const std::string& word) const;
  const std::string& word(Id id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, Id> ids_;
  std::vector<std::string> words_;
};

// t(f | e) over a conditioning vocabulary (with the null word at id 0) and a
// generated vocabulary. Rows are stored sorted by generated-word id.
class TranslationTable {
 public:
  static constexpr Vocabulary::Id kNullWord = 0;

  TranslationTable();

  Vocabulary& conditioning_vocab() { return e_vocab_; }
  Vocabulary& generated_vocab() { return f_vocab_; }
  const Vocabulary& conditioning_vocab() const { return e_vocab_; }
  const Vocabulary& generated_vocab() const { return f_vocab_; }

  // Probability, or 0 when the pair has no entry.
  double prob(Vocabulary::Id e, Vocabulary::Id f) const;
  // Probability for surface forms; kProbabilityFloor for unseen pairs.
  double prob(const std::string& e, const std::string& f) const;

  std::size_t rows() const { return row_start_.size() - 1; }
  std::size_t entries() const { return probs_.size(); }
  // Largest |sum_f t(f|e) - 1| over non-empty rows.
  double max_row_deviation() const;

  // Row layout: entries for row e live in [row_begin(e), row_begin(e+1)).
  std::size_t row_begin(Vocabulary::Id e) const { return row_start_[e]; }
  Vocabulary::Id entry_word(std::size_t k) const { return cols_[k]; }
  double entry_prob(std::size_t k) const { return probs_[k]; }
  // Index of entry (e, f) or SIZE_MAX.
  std::size_t entry_index(Vocabulary::Id e, Vocabulary::Id f) const;

  // Replaces the sparse layout. `row_start` has one entry per
  // conditioning word plus a sentinel; columns within a row are ascending.
  void assign(std::vector<std::size_t> row_start,
              std::vector<Vocabulary::Id> cols, std::vector<double> probs);
  void set_entry_prob(std::size_t k, double p) { probs_[k] = p; }

 private:
  Vocabulary e_vocab_;
  Vocabulary f_vocab_;
  std::vector<std::size_t> row_start_;
  std::vector<Vocabulary::Id> cols_;
  std::vector<double> probs_;
};

struct IterationStats {
  int iteration = 0;             // 1-based
  double log_likelihood = 0.0;   // natural log, under parameters entering the iteration
  double tension = 0.0;          // tension after the iteration
  double posterior_null = 0.0;   // expected fraction of null alignments
  double max_row_deviation = 0;  // after the M-step
};

// A trained directional model: conditioning side `e`, generated side `f`.
struct AlignmentModel {
  Direction direction = Direction::kSourceToTarget;
  TranslationTable table;
  double tension = 4.0;
  double null_probability = 0.08;
  std::vector<IterationStats> history;
};

using IterationCallback =
    std::function<void(const IterationStats&, const TranslationTable&)>;

// Trains a diagonal-favoring reparameterized IBM Model 2. For the
// target-to-source direction the pair sides are swapped internally.
// Throws tga::Error on an empty corpus.
AlignmentModel train(std::span<const RawPair> corpus,
                     const AlignerConfig& config, Direction direction,
                     const IterationCallback& on_iteration = {});

// Relative diagonal prior for position i (1-based) of n given target
// position j (1-based) of m; -|i/n - j/m|.
double diagonal_feature(std::size_t i, std::size_t j, std::size_t n,
                        std::size_t m);

// Prior over source positions 1..n for target position j, excluding null;
// sums to 1. Computed with the max feature subtracted before exponentiation.
void diagonal_prior(std::size_t j, std::size_t m, std::size_t n, double tension,
                    std::vector<double>& out);

// Viterbi alignment of a sentence pair given in the model's orientation:
// `conditioning` is e, `generated` is f. Links are (e index, f index).
AlignmentLinkSet viterbi(const AlignmentModel& model,
                         const Tokens& conditioning, const Tokens& generated);

// Aligns a pair given as (source, target) with the model's direction taken
// into account; output is in the model's orientation.
AlignmentLinkSet viterbi_pair(const AlignmentModel& model, const RawPair& pair);

// Text dump with a format-version header.
void write_model(std::ostream& out, const AlignmentModel& model);
// Throws ParseError on malformed input or an unsupported version.
AlignmentModel read_model(std::istream& in);

}  // namespace tga
