#include "tga/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "tga/error.hpp"
#include "tga/text.hpp"

namespace tga {

bool is_valid_surface(const std::string& surface) {
  if (surface.empty()) return false;
  return std::none_of(surface.begin(), surface.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

void TaggedSentence::validate() const {
  if (tags.size() != tokens.size())
    throw Error("tagged sentence has " + std::to_string(tokens.size()) +
                " tokens but " + std::to_string(tags.size()) + " tags");
  if (has_pos() && pos.size() != tokens.size())
    throw Error("tagged sentence has " + std::to_string(tokens.size()) +
                " tokens but " + std::to_string(pos.size()) + " POS tags");
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!is_valid_surface(tokens[i]))
      throw Error("token " + std::to_string(i) +
                  " is empty or contains whitespace");
}

GenderTag gender_from_feats(const std::string& feats) {
  if (feats == "_" || feats.empty()) return GenderTag::U;
  for (std::string_view feat : split(feats, '|')) {
    auto eq = feat.find('=');
    if (eq == std::string_view::npos) continue;
    if (feat.substr(0, eq) != "Gender") continue;
    std::string_view value = feat.substr(eq + 1);
    if (value == "Masc") return GenderTag::M;
    if (value == "Fem") return GenderTag::F;
    if (value == "Neut") return GenderTag::N;
    // "Fem,Masc" and unknown values carry no usable signal.
    return GenderTag::U;
  }
  return GenderTag::U;
}

std::optional<TaggedSentence> ConlluReader::next() {
  TaggedSentence sentence;
  std::string line;
  bool in_sentence = false;
  while (read_line(in_, line)) {
    ++line_no_;
    if (line.empty()) {
      if (in_sentence) break;
      continue;
    }
    if (line[0] == '#') {
      in_sentence = true;
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 10)
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no_);
    in_sentence = true;
    std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos)
      continue;
    std::size_t word_id = 0;
    if (!parse_size(id, word_id))
      throw ParseError("invalid token id '" + std::string(id) + "'", line_no_);
    if (word_id != sentence.tokens.size() + 1)
      throw ParseError("non-contiguous token id " + std::string(id) +
                           " (expected " +
                           std::to_string(sentence.tokens.size() + 1) + ")",
                       line_no_);
    std::string form(cols[1]);
    if (!is_valid_surface(form))
      throw ParseError("token form is empty or contains whitespace", line_no_);
    sentence.tokens.push_back(std::move(form));
    sentence.pos.emplace_back(cols[3]);
    sentence.tags.push_back(gender_from_feats(std::string(cols[5])));
  }
  if (!in_sentence) return std::nullopt;
  if (sentence.tokens.empty())
    throw ParseError("sentence without word lines", line_no_);
  return sentence;
}

std::vector<TaggedSentence> parse_conllu(std::istream& in) {
  ConlluReader reader(in);
  std::vector<TaggedSentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

namespace {

const char* feats_for(GenderTag tag) {
  switch (tag) {
    case GenderTag::F: return "Gender=Fem";
    case GenderTag::M: return "Gender=Masc";
    case GenderTag::N: return "Gender=Neut";
    case GenderTag::U: return "_";
  }
  return "_";
}

}  // namespace

void write_conllu(std::ostream& out, const TaggedSentence& sentence) {
  sentence.validate();
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const std::string& upos =
        sentence.has_pos() && !sentence.pos[i].empty() ? sentence.pos[i] : "_";
    out << (i + 1) << '\t' << sentence.tokens[i] << "\t_\t" << upos << "\t_\t"
        << feats_for(sentence.tags[i]) << "\t_\t_\t_\t_\n";
  }
  out << '\n';
}

void write_conllu(std::ostream& out, const std::vector<TaggedSentence>& doc) {
  for (const auto& s : doc) write_conllu(out, s);
}

std::optional<RawPair> ParallelReader::next() {
  std::string src_line, tgt_line;
  for (;;) {
    bool has_src = read_line(source_, src_line);
    bool has_tgt = read_line(target_, tgt_line);
    if (!has_src && !has_tgt) return std::nullopt;
    if (has_src != has_tgt) {
      std::size_t shorter = lines_;
      std::size_t longer = lines_ + 1;
      std::istream& rest = has_src ? source_ : target_;
      std::string tmp;
      while (read_line(rest, tmp)) ++longer;
      std::size_t src_count = has_src ? longer : shorter;
      std::size_t tgt_count = has_src ? shorter : longer;
      throw Error("unequal line counts: source has " +
                  std::to_string(src_count) + " lines, target has " +
                  std::to_string(tgt_count));
    }
    ++lines_;
    RawPair pair{split_whitespace(src_line), split_whitespace(tgt_line)};
    if (pair.source.empty() || pair.target.empty()) {
      ++skips_.skipped;
      skips_.lines.push_back(lines_);
      continue;
    }
    return pair;
  }
}

std::vector<RawPair> parse_parallel(std::istream& source, std::istream& target,
                                    SkipReport* report) {
  ParallelReader reader(source, target);
  std::vector<RawPair> out;
  while (auto p = reader.next()) out.push_back(std::move(*p));
  if (report) *report = reader.skips();
  return out;
}

SentencePair zip_tagged(RawPair pair, TaggedSentence tagged,
                        std::size_t pair_id) {
  tagged.validate();
  const std::size_t n = std::min(pair.target.size(), tagged.tokens.size());
  for (std::size_t i = 0; i < n; ++i)
    if (pair.target[i] != tagged.tokens[i])
      throw Error("pair " + std::to_string(pair_id) + ": token " +
                  std::to_string(i) + " differs between corpus ('" +
                  pair.target[i] + "') and tagged input ('" +
                  tagged.tokens[i] + "')");
  if (pair.target.size() != tagged.tokens.size())
    throw Error("pair " + std::to_string(pair_id) + ": token " +
                std::to_string(n) + " differs between corpus (" +
                std::to_string(pair.target.size()) + " tokens) and tagged input (" +
                std::to_string(tagged.tokens.size()) + " tokens)");
  return SentencePair{std::move(pair.source), std::move(tagged), pair_id};
}

std::vector<SentencePair> zip_tagged(std::vector<RawPair> pairs,
                                     std::vector<TaggedSentence> tagged) {
  if (pairs.size() != tagged.size())
    throw Error("corpus has " + std::to_string(pairs.size()) +
                " pairs but tagged input has " + std::to_string(tagged.size()) +
                " sentences");
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out.push_back(zip_tagged(std::move(pairs[i]), std::move(tagged[i]), i));
  return out;
}

std::optional<Tokens> LineReader::next() {
  std::string line;
  if (!read_line(in_, line)) return std::nullopt;
  ++line_no_;
  return split_whitespace(line);
}

}  // namespace tga
