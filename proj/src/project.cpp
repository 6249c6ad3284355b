#include "tga/project.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "tga/error.hpp"
#include "tga/rng.hpp"
#include "tga/text.hpp"

namespace tga {

GenderTag resolve_projected(const std::vector<GenderTag>& aligned_tags) {
  std::optional<GenderTag> gender;
  for (GenderTag tag : aligned_tags) {
    if (!is_gendered(tag)) continue;
    if (gender && *gender != tag) return GenderTag::U;
    gender = tag;
  }
  return gender.value_or(GenderTag::U);
}

FactoredSentence project_gender(const SentencePair& pair,
                                const AlignmentLinkSet& links) {
  const std::size_t n = pair.source.size();
  const std::size_t m = pair.target.size();
  if (links.src_len() != n || links.tgt_len() != m)
    throw Error("pair " + std::to_string(pair.pair_id) + ": alignment is " +
                std::to_string(links.src_len()) + "x" +
                std::to_string(links.tgt_len()) + " but sentence pair is " +
                std::to_string(n) + "x" + std::to_string(m));
  std::vector<std::vector<GenderTag>> aligned(n);
  for (const Link& l : links.links())
    aligned[l.src].push_back(pair.target.tags[l.tgt]);
  FactoredSentence out{pair.source, {}};
  out.factors.reserve(n);
  for (const auto& tags : aligned) out.factors.push_back(resolve_projected(tags));
  return out;
}

FactoredSentence replicate_subword_factors(const FactoredSentence& factored,
                                           const Tokens& segmented,
                                           std::string_view marker) {
  FactoredSentence out;
  out.tokens = segmented;
  out.factors.reserve(segmented.size());
  std::size_t word = 0;
  std::string rebuilt;
  auto mismatch = [&](const std::string& got) {
    const std::string expected =
        word < factored.size() ? factored.tokens[word] : "<end of sentence>";
    return Error("subword segmentation does not rebuild word " +
                 std::to_string(word) + " ('" + expected + "'); got '" + got +
                 "'");
  };
  for (const std::string& piece : segmented) {
    if (word >= factored.size()) throw mismatch(piece);
    const bool continues =
        !marker.empty() && piece.size() > marker.size() &&
        std::string_view(piece).substr(piece.size() - marker.size()) == marker;
    rebuilt += continues ? piece.substr(0, piece.size() - marker.size()) : piece;
    out.factors.push_back(factored.factors[word]);
    if (!continues) {
      if (rebuilt != factored.tokens[word]) throw mismatch(rebuilt);
      rebuilt.clear();
      ++word;
    }
  }
  if (!rebuilt.empty()) throw mismatch(rebuilt);
  if (word != factored.size()) throw mismatch("<end of sentence>");
  return out;
}

std::optional<DropoutMode> parse_dropout_mode(std::string_view name) {
  if (name == "per_token" || name == "per-token") return DropoutMode::kPerToken;
  if (name == "span_count" || name == "span-count") return DropoutMode::kSpanCount;
  return std::nullopt;
}

std::string_view to_string(DropoutMode mode) {
  return mode == DropoutMode::kPerToken ? "per_token" : "span_count";
}

void DropoutPolicy::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw Error("dropout rate must be in [0, 1]");
}

FactoredSentence tga_dropout(const FactoredSentence& factored,
                             const DropoutPolicy& policy, std::uint64_t index) {
  policy.validate();
  FactoredSentence out = factored;
  const std::size_t n = out.factors.size();
  if (n == 0) return out;
  Rng rng(item_seed(policy.seed, index));
  if (policy.mode == DropoutMode::kPerToken) {
    for (auto& tag : out.factors)
      if (rng.uniform() < policy.rate) tag = GenderTag::U;
    return out;
  }
  const auto max_k = static_cast<std::size_t>(
      std::floor(policy.rate * static_cast<double>(n)));
  const std::size_t k = static_cast<std::size_t>(rng.below(max_k + 1));
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t pick = r + static_cast<std::size_t>(rng.below(n - r));
    std::swap(positions[r], positions[pick]);
    out.factors[positions[r]] = GenderTag::U;
  }
  return out;
}

FactoredSentence force_unannotated(const FactoredSentence& factored) {
  FactoredSentence out = factored;
  std::fill(out.factors.begin(), out.factors.end(), GenderTag::U);
  return out;
}

std::vector<FactoredSentence> build_training_set(
    const std::vector<FactoredSentence>& corpus) {
  std::vector<FactoredSentence> out;
  out.reserve(2 * corpus.size());
  for (const auto& s : corpus) out.push_back(force_unannotated(s));
  out.insert(out.end(), corpus.begin(), corpus.end());
  return out;
}

std::string token_line(const FactoredSentence& s) { return join(s.tokens, " "); }

std::string factor_line(const FactoredSentence& s) {
  std::string out;
  out.reserve(2 * s.factors.size());
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    if (i) out += ' ';
    out += to_char(s.factors[i]);
  }
  return out;
}

std::string inline_line(const FactoredSentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out += ' ';
    out += s.tokens[i];
    out += '|';
    out += to_char(s.factors[i]);
  }
  return out;
}

FactoredSentence parse_factor_lines(std::string_view tokens,
                                    std::string_view factors,
                                    std::size_t line_no) {
  FactoredSentence out;
  out.tokens = split_whitespace(tokens);
  for (const std::string& f : split_whitespace(factors)) {
    auto tag = parse_gender_tag(f);
    if (!tag) throw ParseError("invalid gender factor '" + f + "'", line_no);
    out.factors.push_back(*tag);
  }
  if (out.factors.size() != out.tokens.size())
    throw ParseError(std::to_string(out.tokens.size()) + " tokens but " +
                         std::to_string(out.factors.size()) + " factors",
                     line_no);
  return out;
}

FactoredSentence parse_inline_line(std::string_view line, std::size_t line_no) {
  FactoredSentence out;
  for (const std::string& item : split_whitespace(line)) {
    auto bar = item.rfind('|');
    if (bar == std::string::npos || bar == 0)
      throw ParseError("expected 'token|TAG', got '" + item + "'", line_no);
    auto tag = parse_gender_tag(std::string_view(item).substr(bar + 1));
    if (!tag) throw ParseError("invalid gender factor in '" + item + "'", line_no);
    out.tokens.push_back(item.substr(0, bar));
    out.factors.push_back(*tag);
  }
  return out;
}

void FactorWriter::write(const FactoredSentence& s) {
  if (s.tokens.size() != s.factors.size())
    throw Error("factored sentence has " + std::to_string(s.tokens.size()) +
                " tokens but " + std::to_string(s.factors.size()) + " factors");
  if (is_inline()) {
    *tokens_ << inline_line(s) << '\n';
    return;
  }
  *tokens_ << token_line(s) << '\n';
  *factors_ << factor_line(s) << '\n';
}

void emit_factor_files(const std::vector<FactoredSentence>& corpus,
                       std::ostream& out_tokens, std::ostream& out_factors) {
  FactorWriter w(out_tokens, out_factors);
  for (const auto& s : corpus) w.write(s);
}

void emit_inline(const std::vector<FactoredSentence>& corpus,
                 std::ostream& out) {
  FactorWriter w(out);
  for (const auto& s : corpus) w.write(s);
}

std::vector<FactoredSentence> read_factor_files(std::istream& tokens,
                                                std::istream& factors) {
  std::vector<FactoredSentence> out;
  std::string tl, fl;
  std::size_t line_no = 0;
  for (;;) {
    bool ht = read_line(tokens, tl);
    bool hf = read_line(factors, fl);
    if (!ht && !hf) break;
    ++line_no;
    if (ht != hf)
      throw ParseError("token and factor files differ in line count", line_no);
    out.push_back(parse_factor_lines(tl, fl, line_no));
  }
  return out;
}

std::vector<FactoredSentence> read_inline(std::istream& in) {
  std::vector<FactoredSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) out.push_back(parse_inline_line(line, ++line_no));
  return out;
}

}  // namespace tga
