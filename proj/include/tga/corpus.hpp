#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tga/gender.hpp"

namespace tga {

// A token's index is its position in the vector.
using Tokens = std::vector<std::string>;

// Target-language sentence with per-token grammatical gender from a
// morphological analysis.
struct TaggedSentence {
  Tokens tokens;
  std::vector<GenderTag> tags;
  // Universal POS per token; empty when the source had none.
  std::vector<std::string> pos;

  std::size_t size() const { return tokens.size(); }
  bool has_pos() const { return !pos.empty(); }
  // Throws tga::Error when the parallel streams disagree in length or a
  // surface is empty or contains whitespace.
  void validate() const;
};

struct SentencePair {
  Tokens source;
  TaggedSentence target;
  std::size_t pair_id = 0;
};

struct RawPair {
  Tokens source;
  Tokens target;
};

bool is_valid_surface(const std::string& surface);

// Maps a CoNLL-U FEATS value to a tag. Only the bare Gender key counts;
// layered keys such as Gender[psor] are ignored and multi-valued genders
// ("Fem,Masc") are ambiguous, so they map to U.
GenderTag gender_from_feats(const std::string& feats);

// Streaming CoNLL-U reader. Multiword range lines ("3-4") and empty nodes
// ("3.1") are skipped; word lines are kept.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in) : in_(in) {}

  // Returns std::nullopt at end of input. Throws ParseError on wrong
  // column counts or non-contiguous word ids.
  std::optional<TaggedSentence> next();

  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<TaggedSentence> parse_conllu(std::istream& in);

// Writes ID, FORM, UPOS and a Gender feature; the other columns are "_".
void write_conllu(std::ostream& out, const TaggedSentence& sentence);
void write_conllu(std::ostream& out, const std::vector<TaggedSentence>& doc);

// Lines with an empty side are dropped and counted, so that pairs + skipped
// always equals the line count.
struct SkipReport {
  std::size_t skipped = 0;
  std::vector<std::size_t> lines;  // 1-based line numbers of dropped pairs
};

// Streaming reader over two line-aligned files. Unequal line counts are
// detected when the shorter file runs out.
class ParallelReader {
 public:
  ParallelReader(std::istream& source, std::istream& target)
      : source_(source), target_(target) {}

  std::optional<RawPair> next();

  const SkipReport& skips() const { return skips_; }
  std::size_t lines_read() const { return lines_; }

 private:
  std::istream& source_;
  std::istream& target_;
  std::size_t lines_ = 0;
  SkipReport skips_;
};

std::vector<RawPair> parse_parallel(std::istream& source, std::istream& target,
                                    SkipReport* report = nullptr);

// Pairs each raw pair with its tagged target. Surfaces must match exactly,
// case included.
SentencePair zip_tagged(RawPair pair, TaggedSentence tagged,
                        std::size_t pair_id);
std::vector<SentencePair> zip_tagged(std::vector<RawPair> pairs,
                                     std::vector<TaggedSentence> tagged);

// Reads one whitespace-tokenized sentence per line.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}
  std::optional<Tokens> next();
  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace tga
