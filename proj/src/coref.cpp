#include "tga/coref.hpp"

#include <algorithm>
#include <cctype>
#include <istream>

#include <json.hpp>

#include "tga/error.hpp"
#include "tga/text.hpp"

namespace tga {
namespace {

std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::size_t span_bound(const nlohmann::json& v, std::size_t c, std::size_t s) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw Error("cluster " + std::to_string(c) + " span " + std::to_string(s) +
                ": bounds must be non-negative integers");
  return v.get<std::size_t>();
}

}  // namespace

CorefClusterSet parse_clusters(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("invalid cluster JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("tokens") || !doc["tokens"].is_array())
    throw Error("cluster document needs a \"tokens\" array");
  CorefClusterSet out;
  for (const auto& t : doc["tokens"]) {
    if (!t.is_string()) throw Error("cluster document tokens must be strings");
    out.tokens.push_back(t.get<std::string>());
  }
  if (!doc.contains("clusters")) return out;
  if (!doc["clusters"].is_array())
    throw Error("cluster document \"clusters\" must be an array");
  const std::size_t n = out.tokens.size();
  std::size_t c = 0;
  for (const auto& cluster : doc["clusters"]) {
    if (!cluster.is_array())
      throw Error("cluster " + std::to_string(c) + " must be an array of spans");
    CorefCluster spans;
    std::size_t s = 0;
    for (const auto& span : cluster) {
      if (!span.is_array() || span.size() != 2)
        throw Error("cluster " + std::to_string(c) + " span " +
                    std::to_string(s) + ": expected [start, end]");
      MentionSpan m{span_bound(span[0], c, s), span_bound(span[1], c, s)};
      if (!(m.start < m.end && m.end <= n))
        throw Error("cluster " + std::to_string(c) + " span " +
                    std::to_string(s) + ": [" + std::to_string(m.start) + "," +
                    std::to_string(m.end) + "] is empty or out of range for " +
                    std::to_string(n) + " tokens");
      spans.push_back(m);
      ++s;
    }
    out.clusters.push_back(std::move(spans));
    ++c;
  }
  return out;
}

CorefClusterSet parse_clusters(std::string_view json_text,
                               const Tokens& sentence) {
  CorefClusterSet out = parse_clusters(json_text);
  const std::size_t n = std::min(out.tokens.size(), sentence.size());
  for (std::size_t i = 0; i < n; ++i)
    if (out.tokens[i] != sentence[i])
      throw Error("cluster tokens differ from the sentence at token " +
                  std::to_string(i) + " ('" + out.tokens[i] + "' vs '" +
                  sentence[i] + "')");
  if (out.tokens.size() != sentence.size())
    throw Error("cluster tokens differ from the sentence at token " +
                std::to_string(n) + " (" + std::to_string(out.tokens.size()) +
                " vs " + std::to_string(sentence.size()) + " tokens)");
  return out;
}

void PronounLexicon::set(std::string_view surface, GenderTag tag) {
  if (tag != GenderTag::F && tag != GenderTag::M)
    throw Error("pronoun lexicon accepts only F or M, got " +
                std::string(to_string(tag)) + " for '" + std::string(surface) +
                "'");
  entries_[fold_case(surface)] = tag;
}

std::optional<GenderTag> PronounLexicon::lookup(std::string_view surface) const {
  auto it = entries_.find(fold_case(surface));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PronounLexicon::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2)
      throw ParseError("expected 'surface<TAB>tag'", line_no);
    auto tag = parse_gender_tag(trim(cols[1]));
    std::string_view surface = trim(cols[0]);
    if (!tag || surface.empty())
      throw ParseError("invalid lexicon entry '" + line + "'", line_no);
    try {
      set(surface, *tag);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

PronounLexicon default_lexicon() {
  PronounLexicon lex;
  for (const char* w : {"he", "him", "his", "himself"}) lex.set(w, GenderTag::M);
  for (const char* w : {"she", "her", "hers", "herself"}) lex.set(w, GenderTag::F);
  return lex;
}

FactoredSentence infer_annotations(const Tokens& tokens,
                                   const CorefClusterSet& clusters,
                                   const PronounLexicon& lexicon) {
  const std::size_t n = tokens.size();
  FactoredSentence out{tokens, std::vector<GenderTag>(n, GenderTag::U)};
  // Per token: the gender assigned by some cluster, and whether clusters
  // disagree on it.
  std::vector<std::optional<GenderTag>> assigned(n);
  std::vector<char> conflict(n, 0);
  for (const CorefCluster& cluster : clusters.clusters) {
    std::vector<GenderTag> pronoun_tags;
    for (const MentionSpan& m : cluster) {
      if (m.end != m.start + 1 || m.end > n) continue;
      if (auto tag = lexicon.lookup(tokens[m.start])) pronoun_tags.push_back(*tag);
    }
    if (pronoun_tags.empty()) continue;
    const GenderTag g = pronoun_tags.front();
    if (std::any_of(pronoun_tags.begin(), pronoun_tags.end(),
                    [g](GenderTag t) { return t != g; }))
      continue;
    for (const MentionSpan& m : cluster) {
      for (std::size_t i = m.start; i < std::min(m.end, n); ++i) {
        if (assigned[i] && *assigned[i] != g) conflict[i] = 1;
        assigned[i] = g;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (assigned[i] && !conflict[i]) out.factors[i] = *assigned[i];
  return out;
}

}  // namespace tga
