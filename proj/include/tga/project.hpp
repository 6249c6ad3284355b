#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tga/corpus.hpp"
#include "tga/gender.hpp"
#include "tga/links.hpp"

namespace tga {

// Source tokens with a parallel stream of gender factors.
struct FactoredSentence {
  Tokens tokens;
  std::vector<GenderTag> factors;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const FactoredSentence&) const = default;
};

// Resolves the tags of the target tokens aligned to one source token: the
// shared gender if every gendered tag agrees, U when there is none or they
// conflict.
GenderTag resolve_projected(const std::vector<GenderTag>& aligned_tags);

// Projects target gender onto the source side through `links`, which are in
// (source, target) orientation. Throws tga::Error if the links do not fit the
// pair.
FactoredSentence project_gender(const SentencePair& pair,
                                const AlignmentLinkSet& links);

inline constexpr std::string_view kDefaultSubwordMarker = "@@";

// Gives every subword piece the factor of the word it belongs to. A piece
// ending in `marker` continues into the next piece. Throws tga::Error naming
// the first word whose pieces do not rebuild it.
FactoredSentence replicate_subword_factors(
    const FactoredSentence& factored, const Tokens& segmented,
    std::string_view marker = kDefaultSubwordMarker);

enum class DropoutMode { kPerToken, kSpanCount };

std::optional<DropoutMode> parse_dropout_mode(std::string_view name);
std::string_view to_string(DropoutMode mode);

struct DropoutPolicy {
  DropoutMode mode = DropoutMode::kSpanCount;
  // Per-token replacement probability, or the largest replaced fraction of
  // the sentence in span-count mode.
  double rate = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Replaces factors with U. `index` selects an independent random stream per
// sentence so results do not depend on processing order.
FactoredSentence tga_dropout(const FactoredSentence& factored,
                             const DropoutPolicy& policy,
                             std::uint64_t index = 0);

FactoredSentence force_unannotated(const FactoredSentence& factored);

// Copy with every factor set to U, followed by the corpus as given.
std::vector<FactoredSentence> build_training_set(
    const std::vector<FactoredSentence>& corpus);

// "tok tok ..." and "TAG TAG ..." lines.
std::string token_line(const FactoredSentence& s);
std::string factor_line(const FactoredSentence& s);
// "tok|TAG tok|TAG ..."
std::string inline_line(const FactoredSentence& s);

FactoredSentence parse_factor_lines(std::string_view tokens,
                                    std::string_view factors,
                                    std::size_t line_no = 0);
// The tag follows the last '|' of each item.
FactoredSentence parse_inline_line(std::string_view line,
                                   std::size_t line_no = 0);

// Writes factored sentences either as a token file plus a parallel factor
// file, or as a single inline file.
class FactorWriter {
 public:
  FactorWriter(std::ostream& tokens, std::ostream& factors)
      : tokens_(&tokens), factors_(&factors) {}
  explicit FactorWriter(std::ostream& inline_out) : tokens_(&inline_out) {}

  void write(const FactoredSentence& s);
  bool is_inline() const { return factors_ == nullptr; }

 private:
  std::ostream* tokens_;
  std::ostream* factors_ = nullptr;
};

void emit_factor_files(const std::vector<FactoredSentence>& corpus,
                       std::ostream& out_tokens, std::ostream& out_factors);
void emit_inline(const std::vector<FactoredSentence>& corpus, std::ostream& out);

std::vector<FactoredSentence> read_factor_files(std::istream& tokens,
                                                std::istream& factors);
std::vector<FactoredSentence> read_inline(std::istream& in);

}  // namespace tga
